#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "freecalc/errors.hpp"

namespace freecalc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Default cap on the condition number of any conjugating map.
inline constexpr double kDefaultCondCap = 1e12;

/// Largest singular value (the operator norm) of an arbitrary dense matrix.
template <typename Derived>
double op_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw InvalidInput("op_norm: non-finite entries");
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(m);
  return svd.singularValues()(0);
}

/// Singular values in decreasing order.
template <typename Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived>& m) {
  if (!m.allFinite()) throw InvalidInput("singular_values: non-finite entries");
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(m);
  return svd.singularValues();
}

/// Ratio of extreme singular values; +inf for a singular matrix.
template <typename Derived>
double condition_number(const Eigen::MatrixBase<Derived>& m) {
  const Eigen::VectorXd s = singular_values(m);
  if (s.size() == 0) return 1.0;
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

/// Block-diagonal matrix of the given blocks (blocks need not be square).
ComplexMatrix block_diag(std::span<const ComplexMatrix> blocks);

/// The truncated unilateral shift on C^n: M e_k = e_{k+1}, M e_n = 0.
ComplexMatrix truncated_shift(Eigen::Index n);

/// A d-tuple of n x n complex matrices.
class MatrixTuple {
 public:
  MatrixTuple() = default;
  explicit MatrixTuple(std::vector<ComplexMatrix> mats);
  MatrixTuple(std::initializer_list<ComplexMatrix> mats)
      : MatrixTuple(std::vector<ComplexMatrix>(mats)) {}

  static MatrixTuple zeros(int d, Eigen::Index n);

  int d() const noexcept { return static_cast<int>(mats_.size()); }
  Eigen::Index n() const noexcept { return mats_.empty() ? 0 : mats_.front().rows(); }

  const ComplexMatrix& operator[](int i) const { return mats_[static_cast<std::size_t>(i)]; }
  const std::vector<ComplexMatrix>& mats() const noexcept { return mats_; }

  MatrixTuple operator+(const MatrixTuple& o) const;
  MatrixTuple operator-(const MatrixTuple& o) const;
  MatrixTuple operator*(Complex c) const;
  friend MatrixTuple operator*(Complex c, const MatrixTuple& t) { return t * c; }

  /// Componentwise left/right multiplication by a fixed matrix.
  MatrixTuple left_mul(const ComplexMatrix& a) const;
  MatrixTuple right_mul(const ComplexMatrix& a) const;

  /// Sub-tuple of components [first, first + count).
  MatrixTuple slice(int first, int count) const;
  /// Concatenation of components (same n).
  static MatrixTuple concat(const MatrixTuple& a, const MatrixTuple& b);

  /// Stacks the column-major vectorizations of the components.
  ComplexVector vectorize() const;
  static MatrixTuple unvectorize(const ComplexVector& v, int d, Eigen::Index n);

  /// Frobenius norm over all components; used only as a discrepancy measure.
  double frobenius() const;

 private:
  std::vector<ComplexMatrix> mats_;
};

/// max_i ||x^i|| with the operator norm.
double tuple_norm(const MatrixTuple& x);

/// Componentwise block-diagonal direct sum.
MatrixTuple direct_sum(std::span<const MatrixTuple> xs);
inline MatrixTuple direct_sum(std::initializer_list<MatrixTuple> xs) {
  return direct_sum(std::span<const MatrixTuple>(xs.begin(), xs.size()));
}

/// Componentwise [[x, h], [0, x]].
MatrixTuple upper_block2(const MatrixTuple& x, const MatrixTuple& h);

/// An invertible (l n) x (l n) matrix identifying C^(l n) with l copies of C^n.
struct Embedding {
  enum class Kind { unitary, invertible };

  Embedding(ComplexMatrix mat, Eigen::Index n, Kind kind, double cond_cap = kDefaultCondCap);

  static Embedding identity(Eigen::Index dim);

  Eigen::Index n;
  Eigen::Index l;
  ComplexMatrix mat;
  Kind kind;
  double cond_cap;
};

/// Componentwise s^{-1} z^i s.
MatrixTuple conjugate(const Embedding& s, const MatrixTuple& z);

/// Approximately Haar-distributed unitary, deterministic in `seed`.
ComplexMatrix random_unitary(Eigen::Index n, std::uint64_t seed);

/// U diag(sigma) V* with sigma log-uniform in [1, cond_max].
ComplexMatrix random_invertible(Eigen::Index n, double cond_max, std::uint64_t seed);

/// i.i.d. standard complex Gaussian entries.
ComplexMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// Random tuple with Gaussian components rescaled so that tuple_norm == target.
MatrixTuple random_tuple(int d, Eigen::Index n, double target_norm, std::uint64_t seed);

}  // namespace freecalc
