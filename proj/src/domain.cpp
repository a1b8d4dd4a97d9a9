#include "freecalc/domain.hpp"

#include <cmath>
#include <map>
#include <random>

namespace freecalc {

DomainSpec DomainSpec::polydisk(int d) {
  if (d < 1) throw ArityError("polydisk: d must be positive");
  return DomainSpec{Kind::PolyDisk, d, {}};
}

DomainSpec DomainSpec::rowball(int d) {
  if (d < 1) throw ArityError("rowball: d must be positive");
  return DomainSpec{Kind::RowBall, d, {}};
}

DomainSpec DomainSpec::bdelta(int d, std::vector<std::vector<NcExpr>> delta) {
  if (d < 1) throw ArityError("bdelta: d must be positive");
  if (delta.empty() || delta.front().empty()) throw InvalidInput("bdelta: delta must be a nonempty matrix");
  for (const auto& row : delta) {
    if (row.size() != delta.front().size()) throw InvalidInput("bdelta: ragged delta matrix");
    for (const auto& e : row)
      if (max_var_index(e) > d) throw ArityError("bdelta: entry '" + to_string(e) + "' exceeds d");
  }
  return DomainSpec{Kind::BDelta, d, std::move(delta)};
}

DomainSpec DomainSpec::invertibles() { return DomainSpec{Kind::Invertibles, 1, {}}; }

std::vector<std::vector<NcExpr>> DomainSpec::delta_matrix() const {
  switch (kind) {
    case Kind::PolyDisk: {
      std::vector<std::vector<NcExpr>> m(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m[i].push_back(i == j ? NcExpr::var(i + 1) : NcExpr::constant(0.0));
      return m;
    }
    case Kind::RowBall: {
      std::vector<std::vector<NcExpr>> m(1);
      for (int j = 0; j < d; ++j) m[0].push_back(NcExpr::var(j + 1));
      return m;
    }
    case Kind::BDelta:
      return delta;
    case Kind::Invertibles:
      break;
  }
  throw InvalidInput("the invertibles domain has no defining delta matrix");
}

std::string to_string(DomainSpec::Kind kind) {
  switch (kind) {
    case DomainSpec::Kind::PolyDisk:
      return "polydisk";
    case DomainSpec::Kind::RowBall:
      return "rowball";
    case DomainSpec::Kind::BDelta:
      return "bdelta";
    case DomainSpec::Kind::Invertibles:
      return "invertibles";
  }
  return "unknown";
}

namespace {

void check_arity(const DomainSpec& spec, const MatrixTuple& x) {
  if (x.d() != spec.d)
    throw ArityError("domain arity " + std::to_string(spec.d) + " but tuple has d=" + std::to_string(x.d()));
}

// The two scalars that decide every level inequality.
struct LevelData {
  bool inside = false;
  double primary = 0.0;    // ||delta(x)||, or ||x^{-1}|| for the invertibles
  double tuple = 0.0;      // ||x||
};

LevelData level_data(const DomainSpec& spec, const MatrixTuple& x) {
  check_arity(spec, x);
  LevelData out;
  out.tuple = tuple_norm(x);
  if (spec.kind == DomainSpec::Kind::Invertibles) {
    const Eigen::VectorXd s = singular_values(x[0]);
    const double lo = s(s.size() - 1);
    const double cond = lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
    out.inside = cond <= kInvCondCap;
    out.primary = lo > 0.0 ? 1.0 / lo : std::numeric_limits<double>::infinity();
    return out;
  }
  out.primary = op_norm(delta_eval(spec, x));
  out.inside = out.primary < 1.0;
  return out;
}

bool satisfies(const DomainSpec& spec, const LevelData& v, int k) {
  const double kk = static_cast<double>(k);
  if (spec.kind == DomainSpec::Kind::Invertibles) return v.inside && v.tuple <= kk && v.primary <= kk;
  return v.primary <= 1.0 - 1.0 / kk && v.tuple <= kk;
}

std::optional<int> level_from(const DomainSpec& spec, const LevelData& v) {
  if (!v.inside) return std::nullopt;
  for (int k = 1; k <= kMaxLevel; ++k)
    if (satisfies(spec, v, k)) return k;
  return std::nullopt;
}

// Level inequalities with slack 1e-12: levels of points sitting exactly on
// 1 - 1/k flip under last-bit changes from unitary conjugation or block
// layout, which is rounding rather than a violation.
constexpr double kAuditSlack = 1e-12;

bool satisfies_with_slack(const DomainSpec& spec, const LevelData& v, int k) {
  const double kk = static_cast<double>(k);
  const double tuple = v.tuple - kAuditSlack * (1.0 + v.tuple);
  const double primary = v.primary - kAuditSlack * (1.0 + v.primary);
  if (spec.kind == DomainSpec::Kind::Invertibles) return v.inside && tuple <= kk && primary <= kk;
  return primary <= 1.0 - 1.0 / kk && tuple <= kk;
}

bool close(double a, double b) { return std::abs(a - b) <= kAuditSlack * (1.0 + std::max(std::abs(a), std::abs(b))); }

}  // namespace

ComplexMatrix delta_eval(const DomainSpec& spec, const MatrixTuple& x) {
  check_arity(spec, x);
  const auto delta = spec.delta_matrix();
  const Eigen::Index n = x.n();
  const auto rows = static_cast<Eigen::Index>(delta.size());
  const auto cols = static_cast<Eigen::Index>(delta.front().size());
  ComplexMatrix out = ComplexMatrix::Zero(rows * n, cols * n);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const NcExpr& e = delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (e.kind() == NcExpr::Kind::Const && e.value() == Complex(0.0)) continue;
      out.block(i * n, j * n, n, n) = eval(e, x);
    }
  return out;
}

bool contains(const DomainSpec& spec, const MatrixTuple& x) { return level_data(spec, x).inside; }

std::optional<int> level_index(const DomainSpec& spec, const MatrixTuple& x) {
  return level_from(spec, level_data(spec, x));
}

bool in_level(const DomainSpec& spec, const MatrixTuple& x, int k) {
  if (k < 1) return false;
  return satisfies(spec, level_data(spec, x), k);
}

AuditReport exhaustion_audit(const DomainSpec& spec, const std::vector<MatrixTuple>& samples, std::uint64_t seed) {
  AuditReport report;
  std::mt19937_64 rng(seed);
  for (const auto& x : samples) check_arity(spec, x);

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const MatrixTuple& x = samples[s];
    const LevelData data = level_data(spec, x);
    const auto level = level_from(spec, data);
    report.levels.push_back(level);

    for (int t = 0; t < 20; ++t) {
      const ComplexMatrix u = random_unitary(x.n(), rng());
      const LevelData moved = level_data(spec, conjugate(Embedding(u, x.n(), Embedding::Kind::unitary), x));
      const bool tie = moved.inside == data.inside && close(moved.primary, data.primary) && close(moved.tuple, data.tuple);
      if (level_from(spec, moved) != level && !tie) {
        report.unitary_invariance = false;
        report.failures.push_back({"unitary_invariance", "sample " + std::to_string(s) + " trial " + std::to_string(t)});
        break;
      }
    }

    if (!level) continue;
    const int k = *level;
    if (!in_level(spec, x, k + 1)) {
      report.monotone = false;
      report.failures.push_back({"monotone", "sample " + std::to_string(s) + " not in level " + std::to_string(k + 1)});
    }

    // Points within 1/(k(k+1)) of Omega_k should stay inside Omega_{k+1};
    // probe with half that radius.
    const double eps = 1.0 / (static_cast<double>(k) * (k + 1));
    for (int t = 0; t < 4; ++t) {
      const MatrixTuple e = random_tuple(x.d(), x.n(), 0.5 * eps, rng());
      if (!in_level(spec, x + e, k + 1)) {
        report.interior = false;
        report.failures.push_back({"interior", "sample " + std::to_string(s) + " perturbation " + std::to_string(t)});
        break;
      }
    }
  }

  std::map<int, std::vector<MatrixTuple>> by_level;
  for (std::size_t s = 0; s < samples.size(); ++s)
    if (report.levels[s]) by_level[*report.levels[s]].push_back(samples[s]);
  for (const auto& [k, members] : by_level) {
    const std::size_t take = std::min<std::size_t>(members.size(), 4);
    for (std::size_t m = 2; m <= take; ++m) {
      const MatrixTuple ds = direct_sum(std::span<const MatrixTuple>(members.data(), m));
      if (!satisfies_with_slack(spec, level_data(spec, ds), k)) {
        report.direct_sum_closure = false;
        report.failures.push_back({"direct_sum_closure", "level " + std::to_string(k) + " multiplicity " + std::to_string(m)});
      }
    }
  }

  if (!report.levels.empty()) {
    const auto first = report.levels.front();
    bool same = true;
    for (const auto& l : report.levels) same = same && (l == first);
    if (same) report.common_level = first;
    bool increasing = report.levels.size() >= 2;
    for (std::size_t s = 1; s < report.levels.size() && increasing; ++s)
      increasing = report.levels[s] && report.levels[s - 1] && *report.levels[s] > *report.levels[s - 1];
    report.levels_strictly_increasing = increasing;
  }
  return report;
}

}  // namespace freecalc
