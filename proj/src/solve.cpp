#include "freecalc/solve.hpp"

#include <cmath>
#include <random>

namespace freecalc {

namespace {

double residual_norm(const NcMap& f, const MatrixTuple& x, const MatrixTuple& target) {
  return tuple_norm(eval_map(f, x) - target);
}

// Least-squares solve of J delta = rhs, dropping directions below the
// injectivity threshold.
ComplexVector lstsq(const ComplexMatrix& j, const ComplexVector& rhs) {
  Eigen::JacobiSVD<ComplexMatrix> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kInjectiveTol);
  return svd.solve(rhs);
}

// Shared Newton loop. `assemble(x)` returns the full input tuple for the
// unknown x, `linearize_at` its derivative with respect to x.
template <typename Assemble, typename Linearize>
NewtonTrace newton_loop(const NcMap& f, const MatrixTuple& target, const MatrixTuple& x0, double tol, int max_iter,
                        Assemble&& assemble, Linearize&& linearize_at) {
  if (!(tol > 0.0)) throw InvalidInput("newton: tolerance must be positive");
  if (max_iter < 0) throw InvalidInput("newton: max_iter must be nonnegative");
  NewtonTrace trace;
  MatrixTuple x = x0;
  double res = residual_norm(f, assemble(x), target);
  trace.iterates.push_back(x);
  trace.residual_norms.push_back(res);

  for (int it = 0; it < max_iter && res > tol; ++it) {
    const DerivativeReport rep = linearize_at(x);
    if (!rep.injective)
      throw DegenerateDerivative("derivative is not injective at iterate " + std::to_string(it) +
                                     " (sigma_min = " + std::to_string(rep.sigma_min) + ")",
                                 x, rep.sigma_min);
    const MatrixTuple r = eval_map(f, assemble(x)) - target;
    const MatrixTuple step = MatrixTuple::unvectorize(lstsq(rep.matrixization, -r.vectorize()), x.d(), x.n());

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, lambda *= 0.5) {
      const MatrixTuple trial = x + step * Complex(lambda);
      double trial_res = 0.0;
      try {
        trial_res = residual_norm(f, assemble(trial), target);
      } catch (const SingularError&) {
        continue;
      }
      if (trial_res < res) {
        x = trial;
        res = trial_res;
        trace.iterates.push_back(x);
        trace.residual_norms.push_back(res);
        trace.halvings.push_back(h);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw StallError("no residual decrease after " + std::to_string(kMaxHalvings) + " halvings at iterate " +
                       std::to_string(it) + " (residual " + std::to_string(res) + ")");
  }
  trace.converged = res <= tol;
  trace.sigma_min_at_solution = linearize_at(x).sigma_min;
  return trace;
}

}  // namespace

NewtonTrace newton_invert(const NcMap& f, const MatrixTuple& y, const MatrixTuple& x0, double tol, int max_iter) {
  if (f.d != f.r()) throw ArityError("newton_invert: map must have d == r");
  if (x0.d() != f.d || y.d() != f.r() || x0.n() != y.n()) throw InvalidInput("newton_invert: shape mismatch");
  return newton_loop(f, y, x0, tol, max_iter, [](const MatrixTuple& x) { return x; },
                     [&f](const MatrixTuple& x) { return linearize(f, x); });
}

NewtonTrace implicit_solve(const NcMap& f, const MatrixTuple& y, const MatrixTuple& z0, double tol, int max_iter) {
  if (f.r() >= f.d) throw ArityError("implicit_solve: need r < d");
  if (z0.d() != f.r() || y.d() != f.d - f.r() || y.n() != z0.n()) throw InvalidInput("implicit_solve: shape mismatch");
  const MatrixTuple zero = MatrixTuple::zeros(f.r(), y.n());
  const int first = f.d - f.r();
  return newton_loop(f, zero, z0, tol, max_iter, [&y](const MatrixTuple& z) { return MatrixTuple::concat(y, z); },
                     [&](const MatrixTuple& z) { return linearize_partial(f, MatrixTuple::concat(y, z), first, f.r()); });
}

MatrixTuple random_domain_point(const DomainSpec& spec, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.0, 0.95);
  if (spec.kind == DomainSpec::Kind::Invertibles) {
    const double scale = std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
    return MatrixTuple({random_invertible(n, 10.0, rng()) * Complex(scale)});
  }
  MatrixTuple x = random_tuple(spec.d, n, 1.0, rng());
  const double r = radius(rng);
  if (spec.kind == DomainSpec::Kind::PolyDisk) return x * Complex(r);
  if (spec.kind == DomainSpec::Kind::RowBall) return x * Complex(r / op_norm(delta_eval(spec, x)));
  x = x * Complex(r);
  for (int i = 0; i < 60 && !contains(spec, x); ++i) x = x * Complex(0.5);
  return x;
}

ProbeReport injectivity_probe(const NcMap& f, const DomainSpec& spec, int trials, std::uint64_t seed) {
  if (spec.d != f.d) throw ArityError("injectivity_probe: domain arity does not match the map");
  ProbeReport report;
  report.trials = trials;
  std::mt19937_64 rng(seed);
  constexpr double kWitnessTol = 1e-6;

  for (int t = 0; t < trials; ++t) {
    const Eigen::Index n = 1 + t % 3;
    const MatrixTuple x = random_domain_point(spec, n, rng());
    const std::uint64_t start_seed = rng();

    try {
      const DerivativeReport rep = linearize(f, x);
      if (rep.sigma_min < report.min_sigma_min) {
        report.min_sigma_min = rep.sigma_min;
        report.argmin = x;
      }
    } catch (const Error&) {
      continue;
    }

    if (f.d != f.r()) continue;
    const MatrixTuple target = eval_map(f, x);
    try {
      const MatrixTuple start = random_domain_point(spec, n, start_seed);
      const NewtonTrace trace = newton_invert(f, target, start, 1e-13 * (1.0 + tuple_norm(target)), 60);
      if (!trace.converged) continue;
      const MatrixTuple& xp = trace.solution();
      const double separation = tuple_norm(xp - x);
      if (separation <= 1e-6 * (1.0 + tuple_norm(x)) || !contains(spec, xp)) continue;

      ProbeReport::Collision c{x, xp, separation, trace.residual_norms.back()};
      const MatrixTuple z = direct_sum({x, xp});
      const MatrixTuple diff = x - xp;
      std::vector<ComplexMatrix> dir;
      for (int i = 0; i < f.d; ++i) {
        ComplexMatrix m = ComplexMatrix::Zero(2 * n, 2 * n);
        m.topRightCorner(n, n) = diff[i];
        dir.push_back(std::move(m));
      }
      c.witness_residual = tuple_norm(derivative(f, z, MatrixTuple(std::move(dir)))) / separation;
      c.witness_sigma_min = linearize(f, z).sigma_min;
      if (c.witness_sigma_min < report.min_sigma_min) {
        report.min_sigma_min = c.witness_sigma_min;
        report.argmin = z;
      }
      report.collisions.push_back(std::move(c));
    } catch (const Error&) {
      continue;
    }
  }
  report.suspected_violation = !report.collisions.empty() && report.min_sigma_min > kWitnessTol;
  return report;
}

}  // namespace freecalc
