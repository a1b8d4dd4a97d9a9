#include "freecalc/suites.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace freecalc {

void SuiteConfig::validate() const {
  if (trials < 1) throw InvalidInput("config: trials must be at least 1");
  if (dims.empty()) throw InvalidInput("config: dims must be nonempty");
  for (const auto n : dims)
    if (n < 1) throw InvalidInput("config: dims must be positive");
  if (!(tol > 0.0)) throw InvalidInput("config: tol must be positive");
  if (!(cond_cap >= 1.0)) throw InvalidInput("config: cond_cap must be at least 1");
  if (!(point_norm > 0.0)) throw InvalidInput("config: point_norm must be positive");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw InvalidInput("config: bad value '" + v + "' for " + key);
  return out;
}

}  // namespace

SuiteConfig parse_config(const std::string& text) {
  SuiteConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "trials") {
      cfg.trials = parse_number<int>(key, value);
    } else if (key == "tol") {
      cfg.tol = parse_number<double>(key, value);
    } else if (key == "cond_cap") {
      cfg.cond_cap = parse_number<double>(key, value);
    } else if (key == "point_norm") {
      cfg.point_norm = parse_number<double>(key, value);
    } else if (key == "dims") {
      cfg.dims.clear();
      std::istringstream parts(value);
      std::string part;
      while (std::getline(parts, part, ',')) cfg.dims.push_back(parse_number<Eigen::Index>(key, trim(part)));
    } else {
      throw InvalidInput("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_env_overrides(SuiteConfig& cfg) {
  if (const char* s = std::getenv("FREECALC_SEED"); s != nullptr && *s != '\0')
    cfg.seed = parse_number<std::uint64_t>("FREECALC_SEED", s);
}

json to_json(const SuiteReport& r) {
  return {{"suite", r.name},
          {"passed", r.passed},
          {"failed", r.failed},
          {"skipped", r.skipped},
          {"ok", r.ok()},
          {"worst_discrepancy", r.worst_discrepancy},
          {"worst_scale", r.worst_scale},
          {"witness", r.witness},
          {"runtime_seconds", r.runtime_seconds}};
}

namespace {

// One randomized comparison: returns (discrepancy, scale, witness); an
// empty witness means the trial was skipped.
struct Trial {
  double discrepancy = 0.0;
  double scale = 1.0;
  json witness;
};

template <typename RunTrial>
SuiteReport run_trials(const std::string& name, const SuiteConfig& cfg, RunTrial&& run_trial) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  report.name = name;
  std::mt19937_64 rng(cfg.seed);
  bool have_failure = false;
  for (int t = 0; t < cfg.trials; ++t) {
    const Eigen::Index n = cfg.dims[static_cast<std::size_t>(t) % cfg.dims.size()];
    Trial trial;
    try {
      trial = run_trial(n, rng());
    } catch (const SingularError&) {
      ++report.skipped;
      continue;
    } catch (const DilationError&) {
      ++report.skipped;
      continue;
    }
    const bool ok = trial.discrepancy <= cfg.tol * trial.scale;
    ok ? ++report.passed : ++report.failed;
    const bool worse = trial.discrepancy / trial.scale > report.worst_discrepancy / report.worst_scale;
    if ((!ok && !have_failure) || (worse && (have_failure == !ok))) {
      report.worst_discrepancy = trial.discrepancy;
      report.worst_scale = trial.scale;
      trial.witness["trial"] = t;
      report.witness = trial.witness;
      have_failure = have_failure || !ok;
    }
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// Similarity used by a suite; cond_cap == 1 means a unitary.
ComplexMatrix suite_similarity(Eigen::Index n, double cond_cap, std::uint64_t seed) {
  return cond_cap > 1.0 ? random_invertible(n, cond_cap, seed) : random_unitary(n, seed);
}

MatrixTuple similar(const ComplexMatrix& s, const MatrixTuple& z, double cond_cap) {
  return conjugate(Embedding(s, z.n(), Embedding::Kind::invertible, std::max(cond_cap, 1.0) * (1 + 1e-9)), z);
}

MapEvaluator or_default(const NcMap& f, const MapEvaluator& eval) {
  if (eval) return eval;
  return [&f](const MatrixTuple& x) { return eval_map(f, x); };
}

double max_norm(std::initializer_list<const MatrixTuple*> ts) {
  double best = 0.0;
  for (const auto* t : ts) best = std::max(best, tuple_norm(*t));
  return best;
}

}  // namespace

SuiteReport directsum_suite(const NcMap& f, const SuiteConfig& cfg, const MapEvaluator& eval) {
  const MapEvaluator ev = or_default(f, eval);
  return run_trials("directsum", cfg, [&](Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Eigen::Index n2 = cfg.dims[rng() % cfg.dims.size()];
    const MatrixTuple x = random_tuple(f.d, n, cfg.point_norm, rng());
    const MatrixTuple y = random_tuple(f.d, n2, cfg.point_norm, rng());
    const ComplexMatrix s = suite_similarity(n + n2, cfg.cond_cap, rng());
    const MatrixTuple point = similar(s, direct_sum({x, y}), cfg.cond_cap);
    const MatrixTuple lhs = ev(point);
    const MatrixTuple fx = ev(x), fy = ev(y);
    const MatrixTuple rhs = similar(s, direct_sum({fx, fy}), cfg.cond_cap);
    Trial t;
    t.discrepancy = tuple_norm(lhs - rhs);
    t.scale = 1.0 + max_norm({&x, &y, &point, &lhs, &rhs, &fx, &fy});
    t.witness = {{"map", to_json(f)}, {"x", to_json(x)}, {"y", to_json(y)}, {"s", to_json(s)},
                 {"discrepancy", t.discrepancy}};
    return t;
  });
}

SuiteReport intertwine_suite(const NcMap& f, const SuiteConfig& cfg, const MapEvaluator& eval) {
  const MapEvaluator ev = or_default(f, eval);
  return run_trials("intertwine", cfg, [&](Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const MatrixTuple x = random_tuple(f.d, n, cfg.point_norm, rng());
    const ComplexMatrix l = suite_similarity(n, cfg.cond_cap, rng());
    const ComplexMatrix l_inv = l.inverse();
    const MatrixTuple y = x.left_mul(l).right_mul(l_inv);
    const MatrixTuple lhs = ev(x).left_mul(l);
    const MatrixTuple rhs = ev(y).right_mul(l);
    Trial t;
    t.discrepancy = tuple_norm(lhs - rhs);
    t.scale = 1.0 + max_norm({&x, &y, &lhs, &rhs});
    t.witness = {{"map", to_json(f)}, {"x", to_json(x)}, {"L", to_json(l)}, {"y", to_json(y)},
                 {"discrepancy", t.discrepancy}};
    return t;
  });
}

SuiteReport similarity_suite(const NcMap& f, const SuiteConfig& cfg, const MapEvaluator& eval) {
  const MapEvaluator ev = or_default(f, eval);
  return run_trials("similarity", cfg, [&](Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const MatrixTuple x = random_tuple(f.d, n, cfg.point_norm, rng());
    const ComplexMatrix s = suite_similarity(n, cfg.cond_cap, rng());
    const MatrixTuple moved = similar(s, x, cfg.cond_cap);
    const MatrixTuple lhs = ev(moved);
    const MatrixTuple fx = ev(x);
    const MatrixTuple rhs = similar(s, fx, cfg.cond_cap);
    Trial t;
    t.discrepancy = tuple_norm(lhs - rhs);
    t.scale = 1.0 + max_norm({&x, &moved, &lhs, &rhs, &fx});
    t.witness = {{"map", to_json(f)}, {"x", to_json(x)}, {"s", to_json(s)}, {"discrepancy", t.discrepancy}};
    return t;
  });
}

SuiteReport derivative_nc_suite(const NcMap& f, const SuiteConfig& cfg) {
  return run_trials("derivative-nc", cfg, [&](Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Eigen::Index n2 = cfg.dims[rng() % cfg.dims.size()];
    const MatrixTuple x = random_tuple(f.d, n, cfg.point_norm, rng());
    const MatrixTuple y = random_tuple(f.d, n2, cfg.point_norm, rng());
    const MatrixTuple h = random_tuple(f.d, n, 1.0, rng());
    const MatrixTuple k = random_tuple(f.d, n2, 1.0, rng());
    const ComplexMatrix s = suite_similarity(n + n2, cfg.cond_cap, rng());
    const MatrixTuple point = similar(s, direct_sum({x, y}), cfg.cond_cap);
    const MatrixTuple dir = similar(s, direct_sum({h, k}), cfg.cond_cap);
    const MatrixTuple lhs = derivative(f, point, dir);
    const MatrixTuple dx = derivative(f, x, h), dy = derivative(f, y, k);
    const MatrixTuple rhs = similar(s, direct_sum({dx, dy}), cfg.cond_cap);
    Trial t;
    t.discrepancy = tuple_norm(lhs - rhs);
    t.scale = 1.0 + max_norm({&x, &y, &h, &k, &point, &dir, &lhs, &rhs, &dx, &dy});
    t.witness = {{"map", to_json(f)}, {"x", to_json(x)}, {"y", to_json(y)}, {"h", to_json(h)},
                 {"k", to_json(k)},   {"s", to_json(s)}, {"discrepancy", t.discrepancy}};
    return t;
  });
}

SuiteReport run_suite(const std::string& name, const NcMap& f, const SuiteConfig& cfg, const MapEvaluator& eval) {
  if (name == "directsum") return directsum_suite(f, cfg, eval);
  if (name == "intertwine") return intertwine_suite(f, cfg, eval);
  if (name == "similarity") return similarity_suite(f, cfg, eval);
  if (name == "derivative-nc") return derivative_nc_suite(f, cfg);
  throw InvalidInput("unknown suite '" + name + "'");
}

MapEvaluator conjugating_evaluator(const NcMap& f) {
  return [&f](const MatrixTuple& x) {
    const MatrixTuple v = eval_map(f, x);
    std::vector<ComplexMatrix> out;
    for (const auto& m : v.mats()) out.push_back(m.conjugate());
    return MatrixTuple(std::move(out));
  };
}

NcMap random_polynomial_map(int d, int r, int max_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<NcExpr> comps;
  for (int j = 0; j < r; ++j) {
    const int terms = 1 + static_cast<int>(rng() % 3);
    std::vector<NcExpr> sum;
    for (int t = 0; t < terms; ++t) {
      const int len = static_cast<int>(rng() % static_cast<std::uint64_t>(max_degree + 1));
      std::vector<NcExpr> word{NcExpr::constant(Complex(g(rng), g(rng)))};
      for (int l = 0; l < len; ++l) word.push_back(NcExpr::var(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d))));
      sum.push_back(NcExpr::prod(std::move(word)));
    }
    comps.push_back(NcExpr::sum(std::move(sum)));
  }
  return NcMap(d, std::move(comps));
}

}  // namespace freecalc
