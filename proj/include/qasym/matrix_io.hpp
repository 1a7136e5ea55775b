#pragma once

// JSON exchange formats shared by the CLI and the test fixtures.
//
//   matrix:  {"dim": d, "re": [[...], ...], "im": [[...], ...]}   ("im" optional)
//   POVM:    [matrix, matrix, ...]

#include <string>
#include <vector>

#include <json.hpp>

#include "qasym/operator_core.hpp"

namespace qasym {

class Povm;

nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json operator_to_json(const HermitianOperator& a);

/// Throws ParameterError on schema violations.
Matrix matrix_from_json(const nlohmann::json& j);
HermitianOperator operator_from_json(const nlohmann::json& j);
DensityOperator density_from_json(const nlohmann::json& j);

nlohmann::json povm_to_json(const Povm& m);
Povm povm_from_json(const nlohmann::json& j);

/// Reads and parses a JSON file; ParameterError if missing or unparsable.
nlohmann::json load_json_file(const std::string& path);

}  // namespace qasym
