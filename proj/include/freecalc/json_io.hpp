#pragma once

#include <json.hpp>

#include <string>

#include "freecalc/diff.hpp"
#include "freecalc/domain.hpp"
#include "freecalc/shift_form.hpp"
#include "freecalc/solve.hpp"

namespace freecalc {

using json = nlohmann::json;

/// Serializes with every floating-point number printed at 17 significant
/// digits, so reruns are byte-identical and values round-trip.
std::string dump(const json& j, int indent = 2);

json load_json_file(const std::string& path);

// {"rows": R, "cols": C, "entries": [[re, im], ...]} in row-major order.
json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

// {"d": D, "n": N, "mats": [matrix, ...]}
json to_json(const MatrixTuple& t);
MatrixTuple tuple_from_json(const json& j);

// {"d": D, "r": R, "components": ["expr", ...]}
json to_json(const NcMap& f);
NcMap map_from_json(const json& j);

// {"kind": "polydisk"|"rowball"|"bdelta"|"invertibles", "d": D, "delta": [["expr", ...], ...]}
json to_json(const DomainSpec& spec);
DomainSpec domain_from_json(const json& j);

json to_json(const DerivativeReport& r);
json to_json(const CheckReport& r);
json to_json(const ShiftFormResult& r);
json to_json(const SizeShiftCheck& r);
json to_json(const DemoReport& r);
json to_json(const AuditReport& r);
json to_json(const ProbeReport& r);
/// Iterates other than the first and last are elided unless `full`.
json to_json(const NewtonTrace& t, bool full = false);

}  // namespace freecalc
