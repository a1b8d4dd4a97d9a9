#include "freecalc/shift_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace freecalc {

std::uint64_t alpha(int k, int d) {
  if (k < 0 || d < 1) throw RangeError("alpha: need k >= 0 and d >= 1");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const auto base = static_cast<std::uint64_t>(d) + 1;
  std::uint64_t total = 0, power = 1;
  for (int j = 0; j <= k; ++j) {
    if (total > kMax - power) throw RangeError("alpha(" + std::to_string(k) + ", " + std::to_string(d) + ") overflows");
    total += power;
    if (j < k) {
      if (power > kMax / base) throw RangeError("alpha(" + std::to_string(k) + ", " + std::to_string(d) + ") overflows");
      power *= base;
    }
  }
  return total;
}

namespace {

// alpha clamped to n, for use as a projection size.
Eigen::Index alpha_clamped(int k, int d, Eigen::Index n) {
  try {
    const std::uint64_t a = alpha(k, d);
    return a >= static_cast<std::uint64_t>(n) ? n : static_cast<Eigen::Index>(a);
  } catch (const RangeError&) {
    return n;
  }
}

// Appends v to the orthonormal columns of q if it is numerically new.
bool try_extend(ComplexMatrix& q, const ComplexVector& v) {
  const double norm = v.norm();
  if (norm == 0.0 || q.cols() == q.rows()) return false;
  ComplexVector w = v;
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index j = 0; j < q.cols(); ++j) w -= q.col(j) * q.col(j).dot(w);
  const double rest = w.norm();
  if (rest <= kFlagRankTol * norm) return false;
  q.conservativeResize(Eigen::NoChange, q.cols() + 1);
  q.col(q.cols() - 1) = w / rest;
  return true;
}

}  // namespace

int GradedFlag::saturation() const {
  const Eigen::Index n = X.n();
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (dims[k] == n) return static_cast<int>(k);
  return -1;
}

GradedFlag build_flag(const MatrixTuple& X, int K) {
  if (K < 1) throw InvalidInput("build_flag: K must be at least 1");
  const Eigen::Index n = X.n();
  if (n < 2) throw InvalidInput("build_flag: dimension must be at least 2");
  const ComplexMatrix shift = truncated_shift(n);

  GradedFlag flag{X, K, {}, {}};
  ComplexMatrix q = ComplexMatrix::Zero(n, 1);
  q(0, 0) = 1.0;
  flag.bases.push_back(q);
  flag.dims.push_back(1);
  for (int k = 0; k < K; ++k) {
    const ComplexMatrix prev = flag.bases.back();
    if (prev.cols() < n) {
      for (Eigen::Index j = 0; j < prev.cols(); ++j) try_extend(q, shift * prev.col(j));
      for (int i = 0; i < X.d(); ++i)
        for (Eigen::Index j = 0; j < prev.cols(); ++j) try_extend(q, X[i] * prev.col(j));
    }
    flag.bases.push_back(q);
    flag.dims.push_back(q.cols());
  }
  return flag;
}

ShiftFormResult build_shift_form(const MatrixTuple& X) {
  const Eigen::Index n = X.n();
  if (n < 2) throw InvalidInput("build_shift_form: dimension must be at least 2");
  // dims[k] >= k + 1, so the flag saturates by degree n - 1.
  GradedFlag flag = build_flag(X, static_cast<int>(n - 1));
  const int sat = flag.saturation();
  if (sat >= 0) {
    flag.bases.resize(static_cast<std::size_t>(sat) + 1);
    flag.dims.resize(static_cast<std::size_t>(sat) + 1);
    flag.K = sat;
  }
  ShiftFormResult out{flag.bases.back(), X, flag};
  if (out.u.cols() != n) return out;  // not saturated: sh flags stay false
  out.tilde = X.left_mul(out.u.adjoint()).right_mul(out.u);

  out.sh1_ok = true;
  for (std::size_t k = 0; k < flag.dims.size(); ++k)
    out.sh1_ok = out.sh1_ok && flag.dims[k] >= static_cast<Eigen::Index>(std::min<std::size_t>(k + 1, n));

  out.sh2_ok = true;
  for (std::size_t k = 0; k < flag.dims.size(); ++k) {
    const Eigen::Index a = alpha_clamped(static_cast<int>(k), X.d(), n);
    if (flag.dims[k] > a) {
      out.sh2_ok = false;
      continue;
    }
    const ComplexMatrix image = out.u.adjoint() * flag.bases[k];
    if (a < n && image.bottomRows(n - a).norm() > 1e-10) out.sh2_ok = false;
  }
  return out;
}

SizeShiftCheck sizeshift_check(const ShiftFormResult& sf, int k) {
  const MatrixTuple& X = sf.flag.X;
  const Eigen::Index n = X.n();
  if (k < 1) throw RangeError("sizeshift_check: k must be at least 1");
  std::uint64_t a64 = 0;
  try {
    a64 = alpha(k, X.d());
  } catch (const RangeError&) {
    a64 = std::numeric_limits<std::uint64_t>::max();
  }
  if (a64 > static_cast<std::uint64_t>(n))
    throw RangeError("sizeshift_check: alpha(" + std::to_string(k) + ", " + std::to_string(X.d()) + ") = " +
                     std::to_string(a64) + " exceeds the truncation dimension " + std::to_string(n));
  const auto a = static_cast<Eigen::Index>(a64);
  const auto b = static_cast<Eigen::Index>(alpha(k - 1, X.d()));
  const auto kk = static_cast<Eigen::Index>(k);

  SizeShiftCheck out;
  out.holds = true;
  out.refined_holds = true;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < X.d(); ++i) {
    const double lhs = op_norm(X[i].topLeftCorner(kk, kk));
    const double rhs = op_norm(sf.tilde[i].topLeftCorner(a, a));
    const double rlhs = op_norm(X[i].leftCols(kk));
    const double rrhs = op_norm(sf.tilde[i].topLeftCorner(a, b));
    out.lhs.push_back(lhs);
    out.rhs.push_back(rhs);
    out.refined_lhs.push_back(rlhs);
    out.refined_rhs.push_back(rrhs);
    out.holds = out.holds && lhs <= rhs + 1e-9;
    out.refined_holds = out.refined_holds && rlhs <= rrhs + 1e-9;
    if (lhs - rhs > worst_gap) {
      worst_gap = lhs - rhs;
      out.worst_lhs = lhs;
      out.worst_rhs = rhs;
    }
  }
  return out;
}

SizeShiftCheck sizeshift_check(const MatrixTuple& X, int k) {
  if (k >= 1) {
    std::uint64_t a = 0;
    try {
      a = alpha(k, X.d());
    } catch (const RangeError&) {
      a = std::numeric_limits<std::uint64_t>::max();
    }
    if (a > static_cast<std::uint64_t>(X.n()))
      throw RangeError("sizeshift_check: alpha(" + std::to_string(k) + ", " + std::to_string(X.d()) +
                       ") exceeds the truncation dimension " + std::to_string(X.n()));
  }
  return sizeshift_check(build_shift_form(X), k);
}

DemoReport truncated_sot_demo(const std::vector<MatrixTuple>& Xs, int lead, double tol) {
  if (Xs.empty()) throw DemoInsufficient("truncated_sot_demo: empty sequence");
  if (lead < 1) throw InvalidInput("truncated_sot_demo: lead must be positive");
  const int d = Xs.front().d();
  const Eigen::Index n = Xs.front().n();
  for (const auto& x : Xs)
    if (x.d() != d || x.n() != n) throw InvalidInput("truncated_sot_demo: members must share d and n");

  DemoReport report;
  const Eigen::Index a = alpha_clamped(lead, d, n);
  const Eigen::Index cols = std::min<Eigen::Index>(lead, n);
  report.block = static_cast<std::size_t>(a);

  std::vector<std::size_t> usable;
  std::vector<std::vector<ComplexMatrix>> blocks;
  for (std::size_t m = 0; m < Xs.size(); ++m) {
    const ShiftFormResult sf = build_shift_form(Xs[m]);
    double defect = 0.0;
    for (int i = 0; i < d; ++i)
      if (a < n) defect = std::max(defect, sf.tilde[i].bottomRows(n - a).leftCols(cols).norm());
    report.containment_defects.push_back(defect);
    const bool ok = sf.sh1_ok && sf.sh2_ok && defect <= 1e-10 * std::max(1.0, tuple_norm(Xs[m]));
    report.containment_ok = report.containment_ok && ok;
    if (!ok) continue;
    usable.push_back(m);
    std::vector<ComplexMatrix> lb;
    for (int i = 0; i < d; ++i) lb.push_back(sf.tilde[i].topLeftCorner(a, a));
    blocks.push_back(std::move(lb));
  }
  if (usable.size() < 2) throw DemoInsufficient("truncated_sot_demo: fewer than 2 usable members");

  // Real coordinates of each member's leading compressions.
  const Eigen::Index coords = 2 * a * a * d;
  Eigen::MatrixXd pts(coords, static_cast<Eigen::Index>(usable.size()));
  for (std::size_t m = 0; m < usable.size(); ++m) {
    Eigen::Index c = 0;
    for (const auto& blk : blocks[m])
      for (Eigen::Index e = 0; e < blk.size(); ++e) {
        pts(c++, static_cast<Eigen::Index>(m)) = blk.reshaped()(e).real();
        pts(c++, static_cast<Eigen::Index>(m)) = blk.reshaped()(e).imag();
      }
  }
  auto diameter = [&](const std::vector<std::size_t>& members) {
    double best = 0.0;
    for (std::size_t p = 0; p < members.size(); ++p)
      for (std::size_t q = p + 1; q < members.size(); ++q)
        best = std::max(best, (pts.col(static_cast<Eigen::Index>(members[p])) -
                               pts.col(static_cast<Eigen::Index>(members[q]))).norm());
    return best;
  };

  std::vector<std::size_t> current(usable.size());
  for (std::size_t m = 0; m < current.size(); ++m) current[m] = m;
  report.diameter = diameter(current);
  while (report.diameter > tol) {
    Eigen::Index axis = 0;
    double spread = -1.0, lo_axis = 0.0;
    for (Eigen::Index c = 0; c < coords; ++c) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const std::size_t m : current) {
        lo = std::min(lo, pts(c, static_cast<Eigen::Index>(m)));
        hi = std::max(hi, pts(c, static_cast<Eigen::Index>(m)));
      }
      if (hi - lo > spread) {
        spread = hi - lo;
        axis = c;
        lo_axis = lo;
      }
    }
    const double mid = lo_axis + 0.5 * spread;
    std::vector<std::size_t> lower, upper;
    for (const std::size_t m : current) (pts(axis, static_cast<Eigen::Index>(m)) <= mid ? lower : upper).push_back(m);
    const bool take_upper = upper.size() > lower.size() ||
                            (upper.size() == lower.size() && upper.back() > lower.back());
    current = take_upper ? upper : lower;
    report.diameter = diameter(current);
    if (current.size() < 2) break;
  }
  report.converged = current.size() >= 2 && report.diameter <= tol;
  for (const std::size_t m : current) report.selected.push_back(usable[m]);
  report.limit = blocks[current.back()];
  return report;
}

}  // namespace freecalc
