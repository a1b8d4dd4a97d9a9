#include "freecalc/diff.hpp"

#include <algorithm>
#include <cmath>

namespace freecalc {

namespace {

void require_shapes(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h) {
  if (x.d() != f.d) throw ArityError("map arity " + std::to_string(f.d) + " but point has d=" + std::to_string(x.d()));
  if (h.d() != x.d() || h.n() != x.n()) throw InvalidInput("direction shape does not match the point");
}

MatrixTuple corner_block(const MatrixTuple& big, Eigen::Index n, Eigen::Index col_block, double scale) {
  std::vector<ComplexMatrix> out;
  out.reserve(big.mats().size());
  for (const auto& m : big.mats()) out.push_back(m.block(0, col_block * n, n, n) / scale);
  return MatrixTuple(std::move(out));
}

// Evaluates f at build(eps), halving eps on singular inverses.
template <typename Build>
std::pair<MatrixTuple, double> dilate(const NcMap& f, const MatrixTuple& x, std::optional<double> forced_eps,
                                      Build&& build) {
  try {
    (void)eval_map(f, x);
  } catch (const SingularError& e) {
    throw DilationError(std::string("map is singular at the base point: ") + e.what());
  }
  if (forced_eps) {
    try {
      return {eval_map(f, build(*forced_eps)), *forced_eps};
    } catch (const SingularError& e) {
      throw DilationError(std::string("dilated point singular at forced eps: ") + e.what());
    }
  }
  for (double eps = 1.0; eps >= kMinDilationEps; eps *= 0.5) {
    try {
      return {eval_map(f, build(eps)), eps};
    } catch (const SingularError&) {
    }
  }
  throw DilationError("dilated point stays singular down to eps = 1e-8");
}

}  // namespace

Dilated derivative_dilated(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h,
                           std::optional<double> forced_eps) {
  require_shapes(f, x, h);
  auto [big, eps] = dilate(f, x, forced_eps, [&](double e) { return upper_block2(x, h * Complex(e)); });
  return {corner_block(big, x.n(), 1, eps), eps};
}

MatrixTuple derivative_fd(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h, double t) {
  require_shapes(f, x, h);
  if (!(t > 0.0)) throw InvalidInput("derivative_fd: step must be positive");
  return (eval_map(f, x + h * Complex(t)) - eval_map(f, x)) * Complex(1.0 / t);
}

MatrixTuple hessian_operand(const MatrixTuple& x, const MatrixTuple& h, const MatrixTuple& k) {
  return upper_block2(upper_block2(x, k), direct_sum({h, h}));
}

Dilated hessian_dilated(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h, const MatrixTuple& k,
                        std::optional<double> forced_eps) {
  require_shapes(f, x, h);
  require_shapes(f, x, k);
  auto [big, eps] = dilate(f, x, forced_eps, [&](double e) {
    return hessian_operand(x, h * Complex(e), k * Complex(e));
  });
  return {corner_block(big, x.n(), 3, eps * eps), eps};
}

void fill_spectrum(DerivativeReport& report) {
  const ComplexMatrix& m = report.matrixization;
  const Eigen::VectorXd s = singular_values(m);
  report.sigma_max = s.size() > 0 ? s(0) : 0.0;
  report.sigma_min = (m.cols() > m.rows() || s.size() == 0) ? 0.0 : s(s.size() - 1);
  const double rank_tol = 1e-9 * report.sigma_max;
  report.surjective_rank = static_cast<int>((s.array() > rank_tol).count());
  if (report.sigma_max == 0.0) report.surjective_rank = 0;
  report.injective = report.sigma_min > kInjectiveTol * std::max(1.0, report.sigma_max);
}

DerivativeReport linearize_partial(const NcMap& f, const MatrixTuple& x, int first, int count) {
  if (x.d() != f.d) throw ArityError("linearize: arity mismatch");
  if (first < 0 || count < 1 || first + count > f.d) throw InvalidInput("linearize: variable range out of bounds");
  const Eigen::Index n = x.n();
  const Eigen::Index nn = n * n;
  DerivativeReport report{x, ComplexMatrix(nn * f.r(), nn * count), count, f.r(), n};
  for (int c = 0; c < count; ++c) {
    for (Eigen::Index idx = 0; idx < nn; ++idx) {
      std::vector<ComplexMatrix> dir(static_cast<std::size_t>(f.d), ComplexMatrix::Zero(n, n));
      dir[static_cast<std::size_t>(first + c)](idx % n, idx / n) = 1.0;
      const Dilated col = derivative_dilated(f, x, MatrixTuple(std::move(dir)));
      report.matrixization.col(c * nn + idx) = col.value.vectorize();
      report.eps = std::min(report.eps, col.eps);
    }
  }
  fill_spectrum(report);
  return report;
}

DerivativeReport linearize(const NcMap& f, const MatrixTuple& x) { return linearize_partial(f, x, 0, f.d); }

DerivativeReport linearize_block_diagonal(const NcMap& f, const MatrixTuple& z,
                                          const std::vector<Eigen::Index>& block_sizes) {
  if (z.d() != f.d) throw ArityError("linearize: arity mismatch");
  Eigen::Index total = 0, cols_per_component = 0;
  for (const Eigen::Index b : block_sizes) {
    total += b;
    cols_per_component += b * b;
  }
  const Eigen::Index n = z.n();
  if (total != n) throw InvalidInput("linearize_block_diagonal: block sizes do not add up to the dimension");
  DerivativeReport report{z, ComplexMatrix(n * n * f.r(), cols_per_component * f.d), f.d, f.r(), n};
  Eigen::Index col = 0;
  for (int c = 0; c < f.d; ++c) {
    Eigen::Index offset = 0;
    for (const Eigen::Index b : block_sizes) {
      for (Eigen::Index j = 0; j < b; ++j)
        for (Eigen::Index i = 0; i < b; ++i) {
          std::vector<ComplexMatrix> dir(static_cast<std::size_t>(f.d), ComplexMatrix::Zero(n, n));
          dir[static_cast<std::size_t>(c)](offset + i, offset + j) = 1.0;
          const Dilated d = derivative_dilated(f, z, MatrixTuple(std::move(dir)));
          report.matrixization.col(col++) = d.value.vectorize();
          report.eps = std::min(report.eps, d.eps);
        }
      offset += b;
    }
  }
  fill_spectrum(report);
  return report;
}

CheckReport directsum_derivative_check(const NcMap& f, const std::vector<MatrixTuple>& points,
                                       const std::vector<MatrixTuple>& hs) {
  CheckReport report;
  if (points.empty() || points.size() != hs.size()) {
    report.passed = false;
    report.failures.push_back("points and directions must be nonempty lists of equal length");
    return report;
  }
  try {
    std::vector<MatrixTuple> parts;
    double scale = 1.0;
    report.sigma_min_parts = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      parts.push_back(derivative(f, points[i], hs[i]));
      scale = std::max({scale, tuple_norm(parts.back()), tuple_norm(points[i]), tuple_norm(hs[i])});
      report.sigma_min_parts = std::min(report.sigma_min_parts, linearize(f, points[i]).sigma_min);
    }
    const MatrixTuple z = direct_sum(points);
    const MatrixTuple dz = derivative(f, z, direct_sum(hs));
    report.value_discrepancy = tuple_norm(dz - direct_sum(parts));
    if (report.value_discrepancy > 1e-9 * scale) {
      report.passed = false;
      report.failures.push_back("Df of the direct sum differs from the direct sum of Df by " +
                                std::to_string(report.value_discrepancy));
    }
    std::vector<Eigen::Index> sizes;
    for (const auto& p : points) sizes.push_back(p.n());
    report.sigma_min_sum = linearize_block_diagonal(f, z, sizes).sigma_min;
    report.sigma_min_full = linearize(f, z).sigma_min;
    if (std::abs(report.sigma_min_sum - report.sigma_min_parts) > 1e-7) {
      report.passed = false;
      report.failures.push_back("sigma_min of the direct sum " + std::to_string(report.sigma_min_sum) +
                                " differs from the minimum over summands " + std::to_string(report.sigma_min_parts));
    }
  } catch (const Error& e) {
    report.passed = false;
    report.failures.push_back(std::string(e.kind()) + ": " + e.what());
  }
  return report;
}

}  // namespace freecalc
