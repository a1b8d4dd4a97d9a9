#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "freecalc/json_io.hpp"

namespace freecalc {

struct SuiteConfig {
  std::uint64_t seed = 0;
  int trials = 100;
  std::vector<Eigen::Index> dims{1, 2, 3, 4};
  /// Condition cap of the random similarities used by the suites.
  double cond_cap = 10.0;
  double tol = 1e-9;
  /// Tuple norm of the random evaluation points.
  double point_norm = 0.5;

  void validate() const;
};

/// Reads `key = value` lines (seed, trials, dims, tol, cond_cap, point_norm);
/// '#' starts a comment. dims is a comma-separated list.
SuiteConfig parse_config(const std::string& text);
SuiteConfig load_config(const std::string& path);
/// FREECALC_SEED, when set, replaces cfg.seed.
void apply_env_overrides(SuiteConfig& cfg);

struct SuiteReport {
  std::string name;
  int passed = 0;
  int failed = 0;
  /// Trials skipped because an inverse was singular on one side.
  int skipped = 0;
  double worst_discrepancy = 0.0;
  double worst_scale = 1.0;
  /// Inputs of the worst trial (or of the first failure).
  json witness;
  double runtime_seconds = 0.0;

  bool ok() const { return failed == 0; }
};

json to_json(const SuiteReport& r);

/// Evaluation of a map; the default is eval_map. Tests substitute broken
/// evaluators to check that the suites detect them.
using MapEvaluator = std::function<MatrixTuple(const MatrixTuple&)>;

/// f(s^{-1}(x (+) y)s) against s^{-1}(f(x) (+) f(y))s.
SuiteReport directsum_suite(const NcMap& f, const SuiteConfig& cfg, const MapEvaluator& eval = {});
/// L f(x) against f(L x L^{-1}) L.
SuiteReport intertwine_suite(const NcMap& f, const SuiteConfig& cfg, const MapEvaluator& eval = {});
/// f(s^{-1} x s) against s^{-1} f(x) s.
SuiteReport similarity_suite(const NcMap& f, const SuiteConfig& cfg, const MapEvaluator& eval = {});
/// The direct-sum axiom for (x, h) -> Df(x)[h]. Always uses the dilation
/// derivative of f.
SuiteReport derivative_nc_suite(const NcMap& f, const SuiteConfig& cfg);

/// Dispatch by name: directsum, intertwine, similarity, derivative-nc.
SuiteReport run_suite(const std::string& name, const NcMap& f, const SuiteConfig& cfg,
                      const MapEvaluator& eval = {});

/// Evaluator returning the entrywise complex conjugate of eval_map.
MapEvaluator conjugating_evaluator(const NcMap& f);

/// Random inverse-free map: each component is a sum of 1-3 monomials with
/// complex Gaussian coefficients and words of length <= max_degree.
NcMap random_polynomial_map(int d, int r, int max_degree, std::uint64_t seed);

}  // namespace freecalc
