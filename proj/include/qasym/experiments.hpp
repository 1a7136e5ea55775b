#pragma once

// Seeded Monte Carlo runs of the tomography plug-in estimators, compared with
// the predicted limit laws.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qasym/divergences.hpp"
#include "qasym/hypothesis_testing.hpp"
#include "qasym/operator_core.hpp"
#include "qasym/pauli_tomography.hpp"

namespace qasym {

enum class ExperimentKind {
  OneSampleAlt,
  TwoSampleAlt,
  OneSampleNull,
  TwoSampleNull,
  Petz,
  Sandwiched,
  Measured,
  HypothesisTest,
};

std::string to_string(ExperimentKind k);
/// ParameterError on unknown names.
ExperimentKind experiment_kind_from_string(const std::string& s);
bool is_null_kind(ExperimentKind k);

struct ExperimentConfig {
  std::string experiment_id = "exp";
  ExperimentKind kind = ExperimentKind::OneSampleAlt;
  std::optional<DensityOperator> rho;
  std::optional<DensityOperator> sigma;
  std::optional<double> alpha;
  std::vector<long long> n_grid{1000, 10000, 100000};
  long long trials = 2000;
  /// r_n = n^exponent. Alternative statistic r_n (D_hat - D), null statistic r_n^2 D_hat.
  double scaling_exponent = 0.5;
  std::uint64_t seed = 0;
  std::string output_path;
  long long reference_draws = 10000;
  int threads = 1;
  /// Petz / sandwiched / measured kinds: also estimate sigma from its own record.
  bool two_sample = false;
  std::vector<Povm> povms;
  /// Only for HypothesisTest.
  std::optional<HypothesisScenario> scenario;

  /// Throws ParameterError describing the first violated rule.
  void validate() const;
};

/// Parses a config object. `seed` (e.g. from the command line) overrides the
/// "seed" field; one of the two must be present.
ExperimentConfig config_from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed = {});

struct TrialRecord {
  std::string experiment_id;
  std::string kind;
  int d = 0;
  std::optional<double> alpha;
  long long n = 0;
  long long trial = 0;
  double statistic = 0.0;
  bool branch_taken = false;
};

inline constexpr const char* kTrialCsvHeader = "experiment_id,kind,d,alpha,n,trial,statistic,branch_taken";
std::string format_trial_row(const TrialRecord& r);
/// Inverse of format_trial_row; ParameterError on malformed rows.
TrialRecord parse_trial_row(const std::string& line);

struct SummaryRow {
  std::string kind;
  long long n;
  double mean;
  double var;
  double v_pred;
  double ks;
  long long trials;
  nlohmann::json to_json() const;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<SummaryRow> summary;
  /// Null kinds: draws of the limit functional at r_n = sqrt(n) scale.
  std::vector<double> reference;

  std::string records_csv() const;
  nlohmann::json summary_json() const;
};

struct GaussianReference {
  double mean;
  double var;
};

/// sup_x |F_n(x) - Phi((x - mean)/sd)|.
double ks_statistic(std::vector<double> sample, const GaussianReference& ref);
/// Two-sample sup distance between empirical CDFs.
double ks_statistic(std::vector<double> sample, std::vector<double> reference);

double sample_mean(const std::vector<double>& x);
/// Unbiased (n-1) variance.
double sample_variance(const std::vector<double>& x);

/// Variance of F(L_rho, L_sigma) for a functional F linear in (L1, L2) with
/// L drawn from the tomography Gaussian limit; L_sigma is omitted when
/// `two_sample` is false.
double predicted_linear_variance(const DensityOperator& rho, const DensityOperator& sigma,
                                 const PauliBasisSet& basis, bool two_sample,
                                 const std::function<double(const HermitianOperator&, const HermitianOperator&)>& f);

/// Convergence study for every kind except HypothesisTest.
ExperimentResult run_convergence_experiment(const ExperimentConfig& cfg);

}  // namespace qasym
