#include "qasym/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "qasym/divergences.hpp"
#include "qasym/errors.hpp"

namespace qasym {

using nlohmann::json;

namespace {

Eigen::MatrixXd real_block(const json& rows, int dim, const char* field) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
    std::ostringstream os;
    os << "matrix field '" << field << "' must be an array of " << dim << " rows";
    throw ParameterError(os.str());
  }
  Eigen::MatrixXd out(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      std::ostringstream os;
      os << "matrix field '" << field << "' row " << i << " must have " << dim << " entries";
      throw ParameterError(os.str());
    }
    for (int k = 0; k < dim; ++k) {
      if (!row[k].is_number()) throw ParameterError(std::string("non-numeric entry in '") + field + "'");
      out(i, k) = row[k].get<double>();
    }
  }
  return out;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ii = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ii.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

json operator_to_json(const HermitianOperator& a) { return matrix_to_json(a.matrix()); }

Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re")) {
    throw ParameterError("matrix JSON needs fields 'dim' and 're'");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) {
    throw ParameterError("matrix 'dim' must be a positive integer");
  }
  const int dim = j["dim"].get<int>();
  Matrix m = real_block(j["re"], dim, "re").cast<Complex>();
  if (j.contains("im")) m += Complex(0.0, 1.0) * real_block(j["im"], dim, "im").cast<Complex>();
  return m;
}

HermitianOperator operator_from_json(const json& j) { return HermitianOperator(matrix_from_json(j)); }

DensityOperator density_from_json(const json& j) { return DensityOperator(operator_from_json(j)); }

json povm_to_json(const Povm& m) {
  json out = json::array();
  for (const auto& e : m.elements()) out.push_back(operator_to_json(e));
  return out;
}

Povm povm_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParameterError("POVM JSON must be a non-empty array of matrices");
  std::vector<HermitianOperator> elements;
  elements.reserve(j.size());
  for (const auto& e : j) elements.push_back(operator_from_json(e));
  return Povm(std::move(elements));
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace qasym
