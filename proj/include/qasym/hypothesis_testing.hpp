#pragma once

// Multi-hypothesis test on D(rho || sigma) with sigma known: tomography of
// rho, plug-in relative entropy, and a decision on shifted intervals
// (eps_i + c/sqrt(n), eps_{i+1} + c/sqrt(n)].

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qasym/operator_core.hpp"

namespace qasym {

/// Q(z) = P(N(0,1) > z).
double normal_q(double z);
/// z with Q(z) = tau; Acklam's rational approximation plus one Newton step.
double inverse_q(double tau);
/// 2 d Q^{-1}(tau) |log b|.
double threshold_c(double tau, int d, double b);
/// Smallest eigenvalue over all states; DomainError if any state is singular.
double min_eigenvalue_bound(const std::vector<DensityOperator>& states);

class HypothesisGrid {
 public:
  /// eps_0 >= 0, strictly increasing, at least two entries.
  explicit HypothesisGrid(std::vector<double> epsilons);
  const std::vector<double>& epsilons() const { return eps_; }
  /// m = number of hypotheses = epsilons().size() - 1.
  int hypothesis_count() const { return static_cast<int>(eps_.size()) - 1; }

 private:
  std::vector<double> eps_;
};

struct TestOutcome {
  /// Empty when the statistic lies above the top shifted boundary.
  std::optional<int> decided_index;
  double statistic;
  std::vector<std::pair<double, double>> shifted_intervals;
};

/// Index i iff D_hat in (eps_i + c/sqrt(n), eps_{i+1} + c/sqrt(n)]; values at or
/// below the lowest boundary go to 0.
TestOutcome decide(double d_hat, long long n, const HypothesisGrid& grid, double c);

struct WilsonInterval {
  double low;
  double high;
};
WilsonInterval wilson_interval(long long successes, long long trials, double z = 1.959963984540054);

struct HypothesisScenario {
  std::vector<DensityOperator> states;
  DensityOperator sigma;
  HypothesisGrid grid;
  double tau;
  long long n;
  long long trials;
  std::uint64_t seed;
  /// Replaces the computed minimum eigenvalue b (must not exceed it).
  std::optional<double> b_override = std::nullopt;
  int threads = 1;
};

/// {states: [...], sigma, epsilons: [...], tau, n, trials, seed, b?}; seed may be
/// supplied separately (CLI), in which case the field is optional.
HypothesisScenario scenario_from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed = {});

struct HypothesisErrorRate {
  int hypothesis;
  long long trials;
  long long errors;
  double rate;
  double wilson_low;
  double wilson_high;
  long long copies_used;
  double divergence;
  double v1_squared;
};

struct ErrorRateReport {
  double c;
  double b;
  double shift;
  std::vector<HypothesisErrorRate> rows;

  /// hypothesis,trials,errors,rate,wilson_low,wilson_high,copies_used
  std::string to_csv() const;
};

/// Validates eps_i < D(rho_i || sigma) <= eps_{i+1} (ParameterError otherwise).
ErrorRateReport simulate_error_rates(const HypothesisScenario& scenario);

}  // namespace qasym
