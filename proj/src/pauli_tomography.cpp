#include "qasym/pauli_tomography.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qasym/errors.hpp"
#include "qasym/frechet.hpp"
#include "qasym/rng.hpp"

namespace qasym {

HermitianOperator single_qubit_pauli(int k) {
  Matrix m = Matrix::Zero(2, 2);
  switch (k) {
    case 0: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 2: m(0, 1) = Complex(0.0, -1.0); m(1, 0) = Complex(0.0, 1.0); break;
    case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw ParameterError("single-qubit Pauli index must be 0..3");
  }
  return HermitianOperator(m);
}

PauliBasisSet build_pauli_basis(int qubits) {
  if (qubits < 1 || qubits > kMaxQubits) {
    std::ostringstream os;
    os << "Pauli basis supports 1.." << kMaxQubits << " qubits, got " << qubits;
    throw ParameterError(os.str());
  }
  PauliBasisSet b;
  b.qubits_ = qubits;
  b.dim_ = 1 << qubits;
  const int d = b.dim_;
  const int count = d * d;
  b.labels_.reserve(count - 1);
  b.ops_.reserve(count - 1);
  std::vector<int> digit(qubits);
  for (int code = 1; code < count; ++code) {
    std::string label(qubits, '0');
    int rest = code;
    for (int q = qubits - 1; q >= 0; --q) {
      digit[q] = rest % 4;
      rest /= 4;
      label[q] = static_cast<char>('0' + digit[q]);
    }
    // Each Pauli string is a signed/phased permutation: row r hits column r ^ flip.
    int flip = 0;
    for (int q = 0; q < qubits; ++q) {
      if (digit[q] == 1 || digit[q] == 2) flip |= 1 << (qubits - 1 - q);
    }
    Matrix m = Matrix::Zero(d, d);
    for (int r = 0; r < d; ++r) {
      Complex v = 1.0;
      for (int q = 0; q < qubits; ++q) {
        const int bit = (r >> (qubits - 1 - q)) & 1;
        if (digit[q] == 2) v *= bit == 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
        else if (digit[q] == 3 && bit == 1) v = -v;
      }
      m(r, r ^ flip) = v;
    }
    b.labels_.push_back(std::move(label));
    b.ops_.push_back(HermitianOperator(std::move(m)));
  }
  return b;
}

BlochVector bloch_coefficients(const HermitianOperator& a, const PauliBasisSet& basis) {
  if (a.dim() != basis.dim()) throw ParameterError("bloch_coefficients: dimension mismatch");
  RealVector s(basis.size());
  for (int j = 0; j < basis.size(); ++j) s[j] = trace_product(a, basis.op(j));
  return {s};
}

HermitianOperator reconstruct(const BlochVector& s, const PauliBasisSet& basis) {
  if (s.coeffs.size() != basis.size()) {
    std::ostringstream os;
    os << "reconstruct: expected " << basis.size() << " coefficients, got " << s.coeffs.size();
    throw ParameterError(os.str());
  }
  const int d = basis.dim();
  Matrix m = Matrix::Identity(d, d);
  for (int j = 0; j < basis.size(); ++j) m += s.coeffs[j] * basis.op(j).matrix();
  return HermitianOperator::hermitian_part(m / static_cast<double>(d));
}

BlochVector MeasurementRecord::estimate() const {
  RealVector s(plus_counts.size());
  const double nn = static_cast<double>(n);
  for (std::size_t j = 0; j < plus_counts.size(); ++j) {
    s[j] = (2.0 * static_cast<double>(plus_counts[j]) - nn) / nn;
  }
  return {s};
}

nlohmann::json MeasurementRecord::to_json() const {
  return nlohmann::json{{"n", n}, {"seed", seed}, {"plus_counts", plus_counts}};
}

MeasurementRecord MeasurementRecord::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("seed") || !j.contains("plus_counts")) {
    throw ParameterError("measurement record needs fields n, seed, plus_counts");
  }
  if (!j["n"].is_number_integer() || !j["seed"].is_number_integer() || !j["plus_counts"].is_array()) {
    throw ParameterError("measurement record has fields of the wrong type");
  }
  MeasurementRecord rec;
  rec.n = j["n"].get<long long>();
  rec.seed = j["seed"].get<std::uint64_t>();
  if (rec.n < 1) throw ParameterError("measurement record needs n >= 1");
  for (const auto& c : j["plus_counts"]) {
    if (!c.is_number_integer()) throw ParameterError("plus_counts must be integers");
    const long long v = c.get<long long>();
    if (v < 0 || v > rec.n) throw ParameterError("plus_counts entries must lie in [0, n]");
    rec.plus_counts.push_back(v);
  }
  return rec;
}

MeasurementRecord sample_record(const DensityOperator& rho, const PauliBasisSet& basis, long long n,
                                std::uint64_t seed, SamplingMode mode) {
  if (n < 1) throw ParameterError("sample_record needs n >= 1");
  const BlochVector s = bloch_coefficients(rho, basis);
  MeasurementRecord rec;
  rec.n = n;
  rec.seed = seed;
  rec.plus_counts.resize(basis.size());
  for (int j = 0; j < basis.size(); ++j) {
    const double p = std::clamp(s.plus(j), 0.0, 1.0);
    std::mt19937_64 gen = substream(seed, {static_cast<std::uint64_t>(j)});
    if (mode == SamplingMode::Binomial) {
      rec.plus_counts[j] = std::binomial_distribution<long long>(n, p)(gen);
    } else {
      std::bernoulli_distribution shot(p);
      long long c = 0;
      for (long long k = 0; k < n; ++k) c += shot(gen) ? 1 : 0;
      rec.plus_counts[j] = c;
    }
  }
  return rec;
}

namespace {

TomographyEstimate psd_or_projected(const HermitianOperator& bar) {
  if (min_eigenvalue(bar) >= -1e-12) return {DensityOperator(bar), false};
  return {project_to_density(bar), true};
}

void check_record(const MeasurementRecord& rec, const PauliBasisSet& basis) {
  if (rec.n < 1) throw ParameterError("measurement record needs n >= 1");
  if (static_cast<int>(rec.plus_counts.size()) != basis.size()) {
    throw ParameterError("measurement record length does not match the Pauli basis");
  }
}

void require_full_rank(const DensityOperator& a, const char* who) {
  if (!(min_eigenvalue(a) > 0.0)) throw DomainError(std::string(who) + ": states must be strictly positive");
}

}  // namespace

TomographyEstimate estimate_rho_detailed(const MeasurementRecord& rec, const PauliBasisSet& basis) {
  check_record(rec, basis);
  return psd_or_projected(reconstruct(rec.estimate(), basis));
}

TomographyEstimate estimate_sigma_detailed(const MeasurementRecord& rec, const PauliBasisSet& basis) {
  const TomographyEstimate inner = estimate_rho_detailed(rec, basis);
  const double n = static_cast<double>(rec.n);
  const int d = basis.dim();
  const HermitianOperator mixed =
      HermitianOperator::identity(d) * (1.0 / (n * d)) + inner.state.op() * (1.0 - 1.0 / n);
  return {DensityOperator(mixed), inner.projected};
}

DensityOperator estimate_rho(const MeasurementRecord& rec, const PauliBasisSet& basis) {
  return estimate_rho_detailed(rec, basis).state;
}

DensityOperator estimate_sigma(const MeasurementRecord& rec, const PauliBasisSet& basis) {
  return estimate_sigma_detailed(rec, basis).state;
}

RealVector limit_coefficient_variances(const HermitianOperator& state, const PauliBasisSet& basis) {
  const BlochVector s = bloch_coefficients(state, basis);
  const double d2 = static_cast<double>(basis.dim()) * basis.dim();
  RealVector v(basis.size());
  for (int j = 0; j < basis.size(); ++j) v[j] = std::max(0.0, 4.0 * s.plus(j) * s.minus(j)) / d2;
  return v;
}

double variance_v1(const DensityOperator& rho, const DensityOperator& sigma, const PauliBasisSet& basis) {
  if (rho.dim() != basis.dim() || sigma.dim() != basis.dim()) {
    throw ParameterError("variance_v1: dimension mismatch");
  }
  require_full_rank(rho, "variance_v1");
  require_full_rank(sigma, "variance_v1");
  const HermitianOperator diff = matrix_function(rho, ScalarFunction::log()) -
                                 matrix_function(sigma, ScalarFunction::log());
  const RealVector w = limit_coefficient_variances(rho, basis);
  double acc = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const double t = trace_product(basis.op(j), diff);
    acc += w[j] * t * t;
  }
  return acc;
}

double variance_v2(const DensityOperator& rho, const DensityOperator& sigma, const PauliBasisSet& basis) {
  const double v1 = variance_v1(rho, sigma, basis);
  // Tr[rho D(gamma_j)] = Tr[gamma_j D(rho)]: the Daleckii-Krein map is self-adjoint.
  const HermitianOperator k = frechet1(sigma, ScalarFunction::log(), rho);
  const RealVector w = limit_coefficient_variances(sigma, basis);
  double acc = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const double t = trace_product(basis.op(j), k);
    acc += w[j] * t * t;
  }
  return v1 + acc;
}

HermitianOperator sample_gaussian_limit(const HermitianOperator& state, const PauliBasisSet& basis,
                                        std::mt19937_64& gen) {
  const RealVector w = limit_coefficient_variances(state, basis);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = basis.dim();
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < basis.size(); ++j) m += (std::sqrt(w[j]) * normal(gen)) * basis.op(j).matrix();
  return HermitianOperator::hermitian_part(m);
}

}  // namespace qasym
