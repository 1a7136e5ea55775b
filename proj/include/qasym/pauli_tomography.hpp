#pragma once

// N-qubit Pauli tomography: basis, simulated +/-1 measurement counts, and the
// plug-in estimators of rho and sigma.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qasym/operator_core.hpp"

namespace qasym {

inline constexpr int kMaxQubits = 6;

/// R0 = I, R1 = X, R2 = Y, R3 = Z.
HermitianOperator single_qubit_pauli(int k);

/// The d^2 - 1 non-identity tensor products, labels in base 4 with the
/// first qubit most significant ("01" = I (x) X).
class PauliBasisSet {
 public:
  int qubits() const { return qubits_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(ops_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<HermitianOperator>& operators() const { return ops_; }
  const HermitianOperator& op(int j) const { return ops_.at(j); }

 private:
  friend PauliBasisSet build_pauli_basis(int qubits);
  int qubits_ = 0;
  int dim_ = 0;
  std::vector<std::string> labels_;
  std::vector<HermitianOperator> ops_;
};

/// 1 <= qubits <= kMaxQubits, else ParameterError.
PauliBasisSet build_pauli_basis(int qubits);

struct BlochVector {
  RealVector coeffs;

  double plus(int j) const { return 0.5 * (1.0 + coeffs[j]); }
  double minus(int j) const { return 0.5 * (1.0 - coeffs[j]); }
};

/// s_j = Tr[A gamma_j].
BlochVector bloch_coefficients(const HermitianOperator& a, const PauliBasisSet& basis);
/// (I + sum_j s_j gamma_j) / d.
HermitianOperator reconstruct(const BlochVector& s, const PauliBasisSet& basis);

struct MeasurementRecord {
  long long n = 0;
  std::uint64_t seed = 0;
  std::vector<long long> plus_counts;

  /// s_hat_j = (2 c_j - n) / n.
  BlochVector estimate() const;
  nlohmann::json to_json() const;
  static MeasurementRecord from_json(const nlohmann::json& j);
};

enum class SamplingMode { Binomial, PerShot };

/// plus_counts[j] ~ Binomial(n, (1 + s_j)/2), drawn from the substream (seed, j).
MeasurementRecord sample_record(const DensityOperator& rho, const PauliBasisSet& basis, long long n,
                                std::uint64_t seed, SamplingMode mode = SamplingMode::Binomial);

struct TomographyEstimate {
  DensityOperator state;
  /// True when the reconstruction was not PSD and had to be projected.
  bool projected;
};

TomographyEstimate estimate_rho_detailed(const MeasurementRecord& rec, const PauliBasisSet& basis);
/// I/(nd) + (1 - 1/n) * (PSD-or-projected reconstruction).
TomographyEstimate estimate_sigma_detailed(const MeasurementRecord& rec, const PauliBasisSet& basis);
DensityOperator estimate_rho(const MeasurementRecord& rec, const PauliBasisSet& basis);
DensityOperator estimate_sigma(const MeasurementRecord& rec, const PauliBasisSet& basis);

/// sum_j (1 - s_j(rho)^2)/d^2 Tr[gamma_j (log rho - log sigma)]^2.  Needs rho, sigma > 0.
double variance_v1(const DensityOperator& rho, const DensityOperator& sigma, const PauliBasisSet& basis);
/// v1^2 + sum_j (1 - s_j(sigma)^2)/d^2 Tr[rho D[log sigma](gamma_j)]^2.
double variance_v2(const DensityOperator& rho, const DensityOperator& sigma, const PauliBasisSet& basis);

/// Per-coefficient variance of the Gaussian limit: (1 - s_j^2) / d^2.
RealVector limit_coefficient_variances(const HermitianOperator& state, const PauliBasisSet& basis);

/// One draw of L = sum_j gamma_j Z_j, Z_j ~ N(0, (1 - s_j^2)/d^2).
HermitianOperator sample_gaussian_limit(const HermitianOperator& state, const PauliBasisSet& basis,
                                        std::mt19937_64& gen);

}  // namespace qasym
