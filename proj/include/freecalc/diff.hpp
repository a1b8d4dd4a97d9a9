#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freecalc/expr.hpp"

namespace freecalc {

/// Smallest dilation scale tried before giving up.
inline constexpr double kMinDilationEps = 1e-8;

/// Result of a dilation evaluation together with the scale that was used.
struct Dilated {
  MatrixTuple value;
  double eps = 1.0;
};

/// Df(x)[h], read from the (1,2) block of f([[x, eps h], [0, x]]) / eps.
///
/// eps starts at 1 and is halved while some inv node is singular at the
/// dilated point. The block equals eps Df(x)[h] exactly for every admissible
/// eps, so the result does not depend on the scale. `forced_eps` pins the
/// scale (no retries).
Dilated derivative_dilated(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h,
                           std::optional<double> forced_eps = std::nullopt);

inline MatrixTuple derivative(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h) {
  return derivative_dilated(f, x, h).value;
}

/// Forward difference (f(x + t h) - f(x)) / t.
MatrixTuple derivative_fd(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h, double t);

/// Hf(x)[h, k] from the (1,4) block of f at the 4n x 4n point
///
///   [[x, k, h, 0],
///    [0, x, 0, h],
///    [0, 0, x, k],
///    [0, 0, 0, x]],
///
/// i.e. the outer 2x2 dilation of X = [[x, k], [0, x]] by H = h (+) h. Here
/// h is the inner direction and k the outer one:
/// Hf(x)[h, k] = d/dt Df(x + t k)[h] at t = 0. Both directions are scaled by
/// the same eps and the block is divided by eps^2.
Dilated hessian_dilated(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h, const MatrixTuple& k,
                        std::optional<double> forced_eps = std::nullopt);

inline MatrixTuple hessian(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h, const MatrixTuple& k) {
  return hessian_dilated(f, x, h, k).value;
}

/// The 4n x 4n operand used by hessian_dilated.
MatrixTuple hessian_operand(const MatrixTuple& x, const MatrixTuple& h, const MatrixTuple& k);

/// Matrix of h -> Df(x)[h] in the canonical entry basis. Column
/// c n^2 + (j n + i) is the image of the tuple whose only nonzero entry is a
/// one in row i, column j of component c; rows are ordered the same way over
/// the r output components.
struct DerivativeReport {
  MatrixTuple x;
  ComplexMatrix matrixization;
  int d = 0;
  int r = 0;
  Eigen::Index n = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool injective = false;
  int surjective_rank = 0;
  /// Smallest dilation scale used over all columns.
  double eps = 1.0;
};

/// Injectivity threshold: sigma_min > kInjectiveTol max(1, sigma_max).
inline constexpr double kInjectiveTol = 1e-9;

DerivativeReport linearize(const NcMap& f, const MatrixTuple& x);

/// Linearization restricted to the variables [first, first + count); used
/// for partial derivatives in implicit solves.
DerivativeReport linearize_partial(const NcMap& f, const MatrixTuple& x, int first, int count);

/// Extreme singular values of a linear map given as a matrix. A map with more
/// columns than rows has sigma_min = 0.
void fill_spectrum(DerivativeReport& report);

/// Linearization at a block-diagonal point restricted to block-diagonal
/// directions (blocks of the given sizes). Its matrix is block diagonal up to
/// a permutation, one block per summand.
DerivativeReport linearize_block_diagonal(const NcMap& f, const MatrixTuple& z,
                                          const std::vector<Eigen::Index>& block_sizes);

struct CheckReport {
  bool passed = true;
  double value_discrepancy = 0.0;
  /// sigma_min over block-diagonal directions at the direct-sum point.
  double sigma_min_sum = 0.0;
  double sigma_min_parts = 0.0;
  /// sigma_min of the unrestricted linearization at the direct-sum point;
  /// off-diagonal directions can push it below sigma_min_parts.
  double sigma_min_full = 0.0;
  std::vector<std::string> failures;
};

/// Checks Df(x_1 (+) ... )[h_1 (+) ...] = (+) Df(x_i)[h_i] and that sigma_min
/// of the direct-sum linearization over block-diagonal directions equals
/// min_i sigma_min(Df(x_i)).
CheckReport directsum_derivative_check(const NcMap& f, const std::vector<MatrixTuple>& points,
                                       const std::vector<MatrixTuple>& hs);

}  // namespace freecalc
