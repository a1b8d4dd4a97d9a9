#include "freecalc/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace freecalc {

namespace {

void write_string(std::string& out, const std::string& s) {
  // Reuse nlohmann's escaping for strings.
  out += json(s).dump();
}

void write(std::string& out, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        write_string(out, it.key());
        out += indent > 0 ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
      }
      out += nl;
      out += close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += scalars || indent == 0 ? ", " : ",";
        if (!scalars) {
          out += nl;
          out += pad;
        }
        first = false;
        write(out, e, indent, depth + 1);
      }
      if (!scalars) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("JSON: missing field '") + key + "'");
  return j.at(key);
}

int positive_int(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw InvalidInput(std::string("JSON: field '") + key + "' must be a positive integer");
  return v.get<int>();
}

}  // namespace

std::string dump(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("'" + path + "': " + e.what());
  }
}

json to_json(const ComplexMatrix& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

ComplexMatrix matrix_from_json(const json& j) {
  const int rows = positive_int(j, "rows");
  const int cols = positive_int(j, "cols");
  const json& entries = field(j, "entries");
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw InvalidInput("JSON matrix: entries length must equal rows * cols");
  ComplexMatrix m(rows, cols);
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c, ++k) {
      const json& e = entries[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw InvalidInput("JSON matrix: each entry must be [re, im]");
      const Complex v(e[0].get<double>(), e[1].get<double>());
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidInput("JSON matrix: non-finite entry");
      m(r, c) = v;
    }
  return m;
}

json to_json(const MatrixTuple& t) {
  json mats = json::array();
  for (const auto& m : t.mats()) mats.push_back(to_json(m));
  return {{"d", t.d()}, {"n", t.n()}, {"mats", mats}};
}

MatrixTuple tuple_from_json(const json& j) {
  const int d = positive_int(j, "d");
  const int n = positive_int(j, "n");
  const json& mats = field(j, "mats");
  if (!mats.is_array() || mats.size() != static_cast<std::size_t>(d))
    throw InvalidInput("JSON tuple: mats must hold d matrices");
  std::vector<ComplexMatrix> out;
  for (const auto& m : mats) {
    out.push_back(matrix_from_json(m));
    if (out.back().rows() != n || out.back().cols() != n) throw InvalidInput("JSON tuple: every matrix must be n x n");
  }
  return MatrixTuple(std::move(out));
}

json to_json(const NcMap& f) {
  json comps = json::array();
  for (const auto& c : f.components) comps.push_back(to_string(c));
  return {{"d", f.d}, {"r", f.r()}, {"components", comps}};
}

NcMap map_from_json(const json& j) {
  const int d = positive_int(j, "d");
  const int r = positive_int(j, "r");
  const json& comps = field(j, "components");
  if (!comps.is_array() || comps.size() != static_cast<std::size_t>(r))
    throw InvalidInput("JSON map: components must hold r expressions");
  std::vector<std::string> exprs;
  for (const auto& c : comps) {
    if (!c.is_string()) throw InvalidInput("JSON map: components must be strings");
    exprs.push_back(c.get<std::string>());
  }
  return NcMap::parse(exprs, d);
}

json to_json(const DomainSpec& spec) {
  json out = {{"kind", to_string(spec.kind)}, {"d", spec.d}};
  if (spec.kind == DomainSpec::Kind::BDelta) {
    json rows = json::array();
    for (const auto& row : spec.delta) {
      json r = json::array();
      for (const auto& e : row) r.push_back(to_string(e));
      rows.push_back(r);
    }
    out["delta"] = rows;
  }
  return out;
}

DomainSpec domain_from_json(const json& j) {
  const json& kind = field(j, "kind");
  if (!kind.is_string()) throw InvalidInput("JSON domain: kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "invertibles") {
    if (j.contains("d") && j.at("d") != 1) throw InvalidInput("JSON domain: invertibles requires d = 1");
    return DomainSpec::invertibles();
  }
  const int d = positive_int(j, "d");
  if (k == "polydisk") return DomainSpec::polydisk(d);
  if (k == "rowball") return DomainSpec::rowball(d);
  if (k == "bdelta") {
    const json& rows = field(j, "delta");
    if (!rows.is_array()) throw InvalidInput("JSON domain: delta must be an array of rows");
    std::vector<std::vector<NcExpr>> delta;
    for (const auto& row : rows) {
      if (!row.is_array()) throw InvalidInput("JSON domain: delta rows must be arrays");
      std::vector<NcExpr> r;
      for (const auto& e : row) {
        if (!e.is_string()) throw InvalidInput("JSON domain: delta entries must be expression strings");
        r.push_back(parse(e.get<std::string>(), d));
      }
      delta.push_back(std::move(r));
    }
    return DomainSpec::bdelta(d, std::move(delta));
  }
  throw InvalidInput("JSON domain: unknown kind '" + k + "'");
}

json to_json(const DerivativeReport& r) {
  return {{"d", r.d},
          {"r", r.r},
          {"n", r.n},
          {"rows", r.matrixization.rows()},
          {"cols", r.matrixization.cols()},
          {"sigma_min", r.sigma_min},
          {"sigma_max", r.sigma_max},
          {"injective", r.injective},
          {"rank", r.surjective_rank},
          {"eps", r.eps}};
}

json to_json(const CheckReport& r) {
  return {{"passed", r.passed},
          {"value_discrepancy", r.value_discrepancy},
          {"sigma_min_sum", r.sigma_min_sum},
          {"sigma_min_parts", r.sigma_min_parts},
          {"sigma_min_full", r.sigma_min_full},
          {"failures", r.failures}};
}

json to_json(const ShiftFormResult& r) {
  json alphas = json::array();
  for (std::size_t k = 0; k < r.flag.dims.size(); ++k) {
    try {
      alphas.push_back(alpha(static_cast<int>(k), r.flag.X.d()));
    } catch (const RangeError&) {
      alphas.push_back(nullptr);
    }
  }
  return {{"u", to_json(r.u)},       {"tilde", to_json(r.tilde)}, {"dims", r.flag.dims},
          {"alpha", alphas},         {"sh1_ok", r.sh1_ok},        {"sh2_ok", r.sh2_ok}};
}

json to_json(const SizeShiftCheck& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"refined_lhs", r.refined_lhs},
          {"refined_rhs", r.refined_rhs},
          {"worst_lhs", r.worst_lhs},
          {"worst_rhs", r.worst_rhs},
          {"holds", r.holds},
          {"refined_holds", r.refined_holds}};
}

json to_json(const DemoReport& r) {
  json limit = json::array();
  for (const auto& m : r.limit) limit.push_back(to_json(m));
  return {{"containment_ok", r.containment_ok},
          {"containment_defects", r.containment_defects},
          {"selected", r.selected},
          {"block", r.block},
          {"diameter", r.diameter},
          {"converged", r.converged},
          {"limit", limit}};
}

json to_json(const AuditReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) levels.push_back(l ? json(*l) : json(nullptr));
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back({{"check", f.check}, {"detail", f.detail}});
  return {{"levels", levels},
          {"unitary_invariance", r.unitary_invariance},
          {"direct_sum_closure", r.direct_sum_closure},
          {"monotone", r.monotone},
          {"interior", r.interior},
          {"common_level", r.common_level ? json(*r.common_level) : json(nullptr)},
          {"levels_strictly_increasing", r.levels_strictly_increasing},
          {"passed", r.passed()},
          {"failures", failures}};
}

json to_json(const ProbeReport& r) {
  json collisions = json::array();
  for (const auto& c : r.collisions)
    collisions.push_back({{"x", to_json(c.x)},
                          {"x_prime", to_json(c.x_prime)},
                          {"separation", c.separation},
                          {"residual", c.residual},
                          {"witness_sigma_min", c.witness_sigma_min},
                          {"witness_residual", c.witness_residual}});
  return {{"trials", r.trials},
          {"min_sigma_min", r.min_sigma_min},
          {"argmin", r.argmin ? to_json(*r.argmin) : json(nullptr)},
          {"collisions", collisions},
          {"suspected_violation", r.suspected_violation}};
}

json to_json(const NewtonTrace& t, bool full) {
  json iterates = json::array();
  for (std::size_t i = 0; i < t.iterates.size(); ++i)
    if (full || i == 0 || i + 1 == t.iterates.size()) iterates.push_back({{"index", i}, {"x", to_json(t.iterates[i])}});
  return {{"converged", t.converged},
          {"steps", t.steps()},
          {"residual_norms", t.residual_norms},
          {"halvings", t.halvings},
          {"sigma_min_at_solution", t.sigma_min_at_solution},
          {"iterates", iterates},
          {"solution", to_json(t.solution())}};
}

}  // namespace freecalc
