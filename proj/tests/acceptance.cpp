// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "freecalc/shift_form.hpp"
#include "freecalc/solve.hpp"
#include "freecalc/suites.hpp"

using namespace freecalc;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

struct Criterion {
  int id;
  const char* name;
  double seconds;
  std::function<void(Outcome&)> body;
};

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

MatrixTuple second_difference(const NcMap& f, const MatrixTuple& x, const MatrixTuple& h, const MatrixTuple& k,
                              double t) {
  const Complex tc(t);
  return (eval_map(f, x + h * tc + k * tc) - eval_map(f, x + h * tc) - eval_map(f, x + k * tc) + eval_map(f, x)) *
         Complex(1.0 / (t * t));
}

void dilation_derivative(Outcome& out) {
  std::mt19937_64 rng(1);
  double worst_fd = 0.0, worst_eps = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3), r = 1 + static_cast<int>(rng() % 3);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
    const NcMap f = random_polynomial_map(d, r, 4, rng());
    const MatrixTuple x = random_tuple(d, n, 1.0, rng()), h = random_tuple(d, n, 1.0, rng());
    const MatrixTuple exact = derivative(f, x, h);
    const MatrixTuple fd = derivative_fd(f, x, h, 1e-5);
    const double scale = 1.0 + std::max({tuple_norm(exact), tuple_norm(fd), tuple_norm(eval_map(f, x))});
    const double e_fd = tuple_norm(exact - fd) / scale;
    const MatrixTuple a = derivative_dilated(f, x, h, 1.0).value, b = derivative_dilated(f, x, h, 0.125).value;
    const double e_eps = tuple_norm(a - b) / scale;
    worst_fd = std::max(worst_fd, e_fd);
    worst_eps = std::max(worst_eps, e_eps);
    out.require(e_fd <= 1e-3, "fd trial " + std::to_string(trial));
    out.require(e_eps <= 1e-10, "eps trial " + std::to_string(trial));
  }
  out.detail << "worst fd/scale " << worst_fd << ", worst eps-variation/scale " << worst_eps;
}

void hessian_formula(Outcome& out) {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 3);
    const NcMap f = random_polynomial_map(d, 1 + static_cast<int>(rng() % 2), 4, rng());
    const MatrixTuple x = random_tuple(d, n, 0.8, rng()), h = random_tuple(d, n, 1.0, rng()),
                      k = random_tuple(d, n, 1.0, rng());
    const MatrixTuple hs = hessian(f, x, h, k);
    const MatrixTuple oracle = second_difference(f, x, h, k, 1e-4);
    const double scale = 1.0 + std::max(tuple_norm(hs), tuple_norm(oracle));
    const double e = tuple_norm(hs - oracle) / scale;
    worst = std::max(worst, e);
    out.require(e <= 1e-2, "oracle trial " + std::to_string(trial));
  }
  const NcMap sq = NcMap::parse({"x1^2"}, 1);
  double worst_sq = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const MatrixTuple x = random_tuple(1, 3, 1.0, s), h = random_tuple(1, 3, 1.0, s + 100),
                      k = random_tuple(1, 3, 1.0, s + 200);
    worst_sq = std::max(worst_sq, max_abs(hessian(sq, x, h, k)[0] - (h[0] * k[0] + k[0] * h[0])));
  }
  out.require(worst_sq <= 1e-12, "x1^2 exactness");
  out.detail << "worst oracle/scale " << worst << ", x1^2 defect " << worst_sq;
}

void nc_axioms(Outcome& out) {
  SuiteConfig cfg;
  cfg.trials = 500;
  cfg.dims = {1, 2, 3};
  cfg.cond_cap = 10.0;
  cfg.tol = 1e-8;
  cfg.seed = 3;
  const std::vector<NcMap> maps = {NcMap::parse({"x1*x2 - 2*x2*x1^2 + 0.5i", "x2^3 - x1"}, 2),
                                   NcMap::parse({"inv(1 - x1*x2)", "x1*inv(2 + x2)"}, 2)};
  for (std::size_t m = 0; m < maps.size(); ++m) {
    for (const char* suite : {"directsum", "intertwine"}) {
      const SuiteReport r = run_suite(suite, maps[m], cfg);
      out.require(r.ok() && r.passed >= 450, std::string(suite) + " on map " + std::to_string(m));
      out.detail << suite << "[" << m << "] " << r.passed << " pass/" << r.failed << " fail/" << r.skipped
                 << " skip worst " << r.worst_discrepancy / r.worst_scale << "; ";
    }
  }
}

void directsum_derivative(Outcome& out) {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const NcMap f = random_polynomial_map(d, d, 3, rng());
    const int parts = 2 + static_cast<int>(rng() % 2);
    std::vector<MatrixTuple> xs, hs;
    for (int i = 0; i < parts; ++i) {
      const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 3);
      xs.push_back(random_tuple(d, n, 0.8, rng()));
      hs.push_back(random_tuple(d, n, 1.0, rng()));
    }
    const CheckReport r = directsum_derivative_check(f, xs, hs);
    const double gap = std::abs(r.sigma_min_sum - r.sigma_min_parts);
    worst = std::max(worst, gap);
    out.require(r.passed && gap <= 1e-7, "trial " + std::to_string(trial));
  }
  out.detail << "worst |sigma_min(sum) - min sigma_min(parts)| " << worst;
}

void injectivity_dichotomy(Outcome& out) {
  const ProbeReport sq = injectivity_probe(NcMap::parse({"x1^2"}, 1), DomainSpec::polydisk(1), 60, 5);
  bool collision_n2 = false;
  double zero_n2 = std::numeric_limits<double>::infinity();
  for (const auto& c : sq.collisions) {
    collision_n2 = collision_n2 || c.x.n() == 2;
    // The witness x (+) x' of a scalar collision is a 2 x 2 point.
    if (c.x.n() == 1) zero_n2 = std::min(zero_n2, c.witness_sigma_min);
  }
  out.require(collision_n2, "x1^2: collision at n = 2");
  out.require(zero_n2 <= 1e-10, "x1^2: sigma_min = 0 at n = 2");
  out.require(!sq.suspected_violation, "x1^2: consistency");

  const ProbeReport good = injectivity_probe(NcMap::parse({"x1 + 0.25*x1^2"}, 1), DomainSpec::polydisk(1), 500, 6);
  out.require(good.collisions.empty(), "x1 + x1^2/4: no collisions");
  out.require(good.min_sigma_min >= 0.4, "x1 + x1^2/4: sigma_min >= 0.4");
  out.detail << "x1^2: " << sq.collisions.size() << " collisions, min sigma_min at n=2 " << zero_n2
             << "; x1 + x1^2/4: " << good.collisions.size() << " collisions, min sigma_min " << good.min_sigma_min;
}

void shift_forms(Outcome& out) {
  std::mt19937_64 rng(7);
  const Eigen::Index n = 8;
  const ComplexMatrix m = truncated_shift(n);
  double worst_ii = 0.0, worst_gap = -1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 2;
    const MatrixTuple X = random_tuple(d, n, 1.0, rng());
    const ShiftFormResult sf = build_shift_form(X);
    const GradedFlag& flag = sf.flag;
    const std::string tag = " trial " + std::to_string(trial);
    out.require(sf.sh1_ok && sf.sh2_ok, "sh1/sh2" + tag);
    out.require(max_abs(sf.u.adjoint() * sf.u - ComplexMatrix::Identity(n, n)) <= 1e-12, "unitarity" + tag);
    for (std::size_t k = 0; k < flag.dims.size(); ++k) {
      const ComplexMatrix& b = flag.bases[k];
      const Eigen::Index rows = std::min<Eigen::Index>(static_cast<Eigen::Index>(k) + 1, n);
      const Eigen::VectorXd s = singular_values(b.topRows(rows));
      out.require(s.size() >= rows && s(rows - 1) > 1e-8, "(i)" + tag);
      out.require(static_cast<std::uint64_t>(flag.dims[k]) <= std::min<std::uint64_t>(alpha(static_cast<int>(k), d), n),
                  "(iv)" + tag);
      if (k + 1 < flag.dims.size()) {
        const ComplexMatrix outside =
            ComplexMatrix::Identity(n, n) - flag.bases[k + 1] * flag.bases[k + 1].adjoint();
        const ComplexMatrix pk = b * b.adjoint();
        double e = op_norm(outside * m * pk);
        for (int i = 0; i < d; ++i) e = std::max(e, op_norm(outside * X[i] * pk) / tuple_norm(X));
        worst_ii = std::max(worst_ii, e);
        out.require(e <= 1e-9, "(ii)" + tag);
      }
    }
    for (int k = 1; alpha(k, d) <= static_cast<std::uint64_t>(n); ++k) {
      const SizeShiftCheck c = sizeshift_check(sf, k);
      out.require(c.holds && c.refined_holds, "sizeshift k=" + std::to_string(k) + tag);
      worst_gap = std::max(worst_gap, c.worst_lhs - c.worst_rhs);
    }
  }
  for (const MatrixTuple& X : {MatrixTuple::zeros(1, n), MatrixTuple({m})})
    out.require(build_shift_form(X).u == ComplexMatrix::Identity(n, n), "u = I for 0 and M");
  out.detail << "worst (ii) defect " << worst_ii << ", worst lhs - rhs " << worst_gap;
}

void newton_round_trip(Outcome& out) {
  const NcMap f = NcMap::parse({"x1 + x1^2"}, 1);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> radius(0.0, 0.25);
  double worst = 0.0, worst_sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
    const MatrixTuple x = random_tuple(1, n, radius(rng), rng());
    const NewtonTrace t = newton_invert(f, eval_map(f, x), MatrixTuple::zeros(1, n));
    const double e = tuple_norm(t.solution() - x);
    worst = std::max(worst, e);
    out.require(t.converged && e <= 1e-8, "round trip " + std::to_string(trial));

    const Eigen::Index n2 = 1 + static_cast<Eigen::Index>(rng() % 3);
    const MatrixTuple xp = random_tuple(1, n2, radius(rng), rng());
    const MatrixTuple b = newton_invert(f, eval_map(f, xp), MatrixTuple::zeros(1, n2)).solution();
    const MatrixTuple joint =
        newton_invert(f, direct_sum({eval_map(f, x), eval_map(f, xp)}), MatrixTuple::zeros(1, n + n2)).solution();
    const double es = tuple_norm(joint - direct_sum({t.solution(), b}));
    worst_sum = std::max(worst_sum, es);
    out.require(es <= 1e-8, "direct sum " + std::to_string(trial));
  }
  out.detail << "worst recovery error " << worst << ", worst direct-sum defect " << worst_sum;
}

void implicit_parametrization(Outcome& out) {
  std::mt19937_64 rng(9);
  const NcMap quad = NcMap::parse({"x2 - x1^2"}, 2);
  const NcMap recip = NcMap::parse({"x1*x2 - 1"}, 2);
  double worst_q = 0.0, worst_r = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
    const MatrixTuple y = random_tuple(1, n, 1.0, rng());
    const NewtonTrace t = implicit_solve(quad, y, MatrixTuple::zeros(1, n));
    const double e = max_abs(t.solution()[0] - y[0] * y[0]);
    worst_q = std::max(worst_q, e);
    out.require(t.converged && e <= 1e-8, "y - x^2 trial " + std::to_string(trial));

    const ComplexMatrix a = random_invertible(n, 10.0, rng());
    const NewtonTrace s = implicit_solve(recip, MatrixTuple({a}), MatrixTuple::zeros(1, n));
    const double er = max_abs(s.solution()[0] - a.inverse());
    worst_r = std::max(worst_r, er);
    out.require(s.converged && er <= 1e-8, "xy - 1 trial " + std::to_string(trial));
  }
  out.detail << "worst |phi - x^2| " << worst_q << ", worst |phi - x^-1| " << worst_r;
}

void domain_exhaustion(Outcome& out) {
  const DomainSpec pd = DomainSpec::polydisk(2);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> radius(0.0, 0.999);
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
    const MatrixTuple x = random_tuple(2, n, radius(rng), rng());
    double t = 0.0;
    for (const auto& m : x.mats()) t = std::max(t, op_norm(m));
    int k = std::max(1, static_cast<int>(std::ceil(1.0 / (1.0 - t))));
    while (k > 1 && t <= 1.0 - 1.0 / (k - 1)) --k;
    while (!(t <= 1.0 - 1.0 / k)) ++k;
    const bool same = level_index(pd, x) == std::optional<int>(k);
    agree += same;
    out.require(same, "closed form trial " + std::to_string(trial));
  }
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
    const MatrixTuple x = random_tuple(2, n, radius(rng), rng());
    const ComplexMatrix u = random_unitary(n, rng());
    const MatrixTuple y = x.left_mul(u.adjoint()).right_mul(u);
    const double e = std::abs(op_norm(delta_eval(pd, x)) - op_norm(delta_eval(pd, y)));
    worst = std::max(worst, e);
    out.require(e <= 1e-12 && level_index(pd, x) == level_index(pd, y), "unitary trial " + std::to_string(trial));
  }
  std::vector<MatrixTuple> seq;
  for (int m = 1; m <= 6; ++m)
    seq.push_back(MatrixTuple({(1.0 - 1.0 / m) * ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 2)}));
  const AuditReport audit = exhaustion_audit(pd, seq, 11);
  out.require(audit.levels_strictly_increasing && !audit.common_level, "(1 - 1/m) sequence");
  out.require(audit.passed(), "audit of (1 - 1/m) sequence");
  out.detail << agree << "/1000 closed-form agreements, worst unitary drift " << worst << ", levels";
  for (const auto& l : audit.levels) out.detail << " " << (l ? std::to_string(*l) : "none");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "dilation derivative exactness", 30, dilation_derivative},
      {2, "hessian formula", 30, hessian_formula},
      {3, "nc axioms (direct sum, intertwining)", 60, nc_axioms},
      {4, "direct-sum derivative identity", 60, directsum_derivative},
      {5, "injectivity dichotomy", 60, injectivity_dichotomy},
      {6, "shift forms", 120, shift_forms},
      {7, "newton inversion round trip", 60, newton_round_trip},
      {8, "implicit parametrization", 30, implicit_parametrization},
      {9, "domain exhaustion", 10, domain_exhaustion},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs <= c.seconds, "runtime over " + std::to_string(static_cast<int>(c.seconds)) + " s");
    failures += !out.ok;
    std::printf("%s  criterion %d: %s (%.2f s / %.0f s) %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs, c.seconds,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
