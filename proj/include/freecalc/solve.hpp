#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "freecalc/diff.hpp"
#include "freecalc/domain.hpp"

namespace freecalc {

/// Raised when the derivative stops being numerically injective during a solve.
class DegenerateDerivative : public Error {
 public:
  DegenerateDerivative(const std::string& what, MatrixTuple iterate, double sigma_min)
      : Error(what), iterate_(std::move(iterate)), sigma_min_(sigma_min) {}
  const char* kind() const noexcept override { return "DegenerateDerivative"; }
  const MatrixTuple& iterate() const noexcept { return iterate_; }
  double sigma_min() const noexcept { return sigma_min_; }

 private:
  MatrixTuple iterate_;
  double sigma_min_;
};

struct NewtonTrace {
  std::vector<MatrixTuple> iterates;
  /// Residual norm (max operator norm over components) at each iterate.
  std::vector<double> residual_norms;
  /// Number of step halvings taken to accept each step.
  std::vector<int> halvings;
  bool converged = false;
  double sigma_min_at_solution = 0.0;

  const MatrixTuple& solution() const { return iterates.back(); }
  int steps() const { return static_cast<int>(iterates.size()) - 1; }
};

inline constexpr int kMaxHalvings = 30;

/// Damped Newton for f(x) = y with d = r. Each step solves the linearized
/// system by least squares on the derivative matrix (singular values below
/// kInjectiveTol * sigma_max are dropped), then halves the step until the
/// residual decreases.
NewtonTrace newton_invert(const NcMap& f, const MatrixTuple& y, const MatrixTuple& x0, double tol = 1e-12,
                          int max_iter = 50);

/// Solves f(y, z) = 0 for z, where y fills the first d - r variables and z
/// the last r, with Newton steps on the partial derivative in z.
NewtonTrace implicit_solve(const NcMap& f, const MatrixTuple& y, const MatrixTuple& z0, double tol = 1e-12,
                           int max_iter = 50);

struct ProbeReport {
  struct Collision {
    MatrixTuple x;
    MatrixTuple x_prime;
    double separation = 0.0;
    double residual = 0.0;
    /// sigma_min of Df at x (+) x'; zero in exact arithmetic, since
    /// Df(x (+) x')[[0, x - x'], [0, 0]] carries f(x) - f(x') in its corner.
    double witness_sigma_min = 0.0;
    double witness_residual = 0.0;
  };

  int trials = 0;
  double min_sigma_min = std::numeric_limits<double>::infinity();
  /// Sample point where min_sigma_min was attained.
  std::optional<MatrixTuple> argmin;
  std::vector<Collision> collisions;
  /// Collision found while every sampled sigma_min stayed large.
  bool suspected_violation = false;
};

/// Two-sided empirical probe of the injectivity dichotomy over dimensions
/// 1..3: Newton-based collision search from random starts inside the domain,
/// and sigma_min(Df) sampling at random domain points.
ProbeReport injectivity_probe(const NcMap& f, const DomainSpec& spec, int trials, std::uint64_t seed);

/// Random point of the domain: Gaussian direction scaled to a random radius
/// strictly inside (polydisk, row ball) or a well-conditioned matrix
/// (invertibles). BDelta samples are radially shrunk until inside.
MatrixTuple random_domain_point(const DomainSpec& spec, Eigen::Index n, std::uint64_t seed);

}  // namespace freecalc
