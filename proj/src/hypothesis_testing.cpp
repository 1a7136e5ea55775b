#include "qasym/hypothesis_testing.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "qasym/divergences.hpp"
#include "qasym/errors.hpp"
#include "qasym/matrix_io.hpp"
#include "qasym/parallel.hpp"
#include "qasym/pauli_tomography.hpp"
#include "qasym/rng.hpp"

namespace qasym {

double normal_q(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

namespace {

// Acklam's approximation to the standard normal quantile, |rel err| < 1.15e-9.
double acklam_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double inverse_q(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    std::ostringstream os;
    os << "inverse_q needs tau in (0,1), got " << tau;
    throw ParameterError(os.str());
  }
  double z = -acklam_quantile(tau);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  if (pdf > 0.0) z += (normal_q(z) - tau) / pdf;
  return z;
}

double threshold_c(double tau, int d, double b) {
  if (d < 1) throw ParameterError("threshold_c needs d >= 1");
  if (!(b > 0.0 && b < 1.0)) throw ParameterError("threshold_c needs b in (0,1)");
  return 2.0 * d * inverse_q(tau) * std::abs(std::log(b));
}

double min_eigenvalue_bound(const std::vector<DensityOperator>& states) {
  if (states.empty()) throw ParameterError("min_eigenvalue_bound needs at least one state");
  double b = kInf;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double lo = min_eigenvalue(states[i]);
    if (!(lo > 0.0)) {
      std::ostringstream os;
      os << "state " << i << " is singular (min eigenvalue " << lo << ")";
      throw DomainError(os.str());
    }
    b = std::min(b, lo);
  }
  return b;
}

HypothesisGrid::HypothesisGrid(std::vector<double> epsilons) : eps_(std::move(epsilons)) {
  if (eps_.size() < 2) throw ParameterError("hypothesis grid needs at least two epsilons");
  if (!(eps_.front() >= 0.0)) throw ParameterError("eps_0 must be >= 0");
  for (std::size_t i = 1; i < eps_.size(); ++i) {
    if (!(eps_[i] > eps_[i - 1]) || !std::isfinite(eps_[i])) {
      throw ParameterError("epsilons must be finite and strictly increasing");
    }
  }
}

TestOutcome decide(double d_hat, long long n, const HypothesisGrid& grid, double c) {
  if (n < 1) throw ParameterError("decide needs n >= 1");
  const double shift = c / std::sqrt(static_cast<double>(n));
  const auto& eps = grid.epsilons();
  TestOutcome out{std::nullopt, d_hat, {}};
  for (int i = 0; i < grid.hypothesis_count(); ++i) {
    out.shifted_intervals.emplace_back(eps[i] + shift, eps[i + 1] + shift);
  }
  if (d_hat <= out.shifted_intervals.front().first) {
    out.decided_index = 0;
    return out;
  }
  for (int i = 0; i < grid.hypothesis_count(); ++i) {
    if (d_hat > out.shifted_intervals[i].first && d_hat <= out.shifted_intervals[i].second) {
      out.decided_index = i;
      break;
    }
  }
  return out;
}

WilsonInterval wilson_interval(long long successes, long long trials, double z) {
  if (trials < 1) throw ParameterError("wilson_interval needs trials >= 1");
  if (successes < 0 || successes > trials) throw ParameterError("wilson_interval: successes out of range");
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double radius = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - radius), std::min(1.0, center + radius)};
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("scenario is missing field '") + key + "'");
  return j[key];
}

}  // namespace

HypothesisScenario scenario_from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed) {
  if (!j.is_object()) throw ParameterError("scenario must be a JSON object");
  const auto& states_j = field(j, "states");
  if (!states_j.is_array() || states_j.empty()) throw ParameterError("'states' must be a non-empty array");
  std::vector<DensityOperator> states;
  for (const auto& s : states_j) states.push_back(density_from_json(s));
  const auto& eps_j = field(j, "epsilons");
  if (!eps_j.is_array()) throw ParameterError("'epsilons' must be an array");
  std::vector<double> eps;
  for (const auto& e : eps_j) {
    if (!e.is_number()) throw ParameterError("'epsilons' entries must be numbers");
    eps.push_back(e.get<double>());
  }
  auto number = [&](const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number()) throw ParameterError(std::string("'") + key + "' must be a number");
    return v.get<double>();
  };
  auto integer = [&](const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number_integer()) throw ParameterError(std::string("'") + key + "' must be an integer");
    return v.get<long long>();
  };
  std::uint64_t s = 0;
  if (seed) {
    s = *seed;
  } else {
    const auto& v = field(j, "seed");
    if (!v.is_number_unsigned() && !v.is_number_integer()) throw ParameterError("'seed' must be an integer");
    s = v.get<std::uint64_t>();
  }
  HypothesisScenario sc{std::move(states), density_from_json(field(j, "sigma")), HypothesisGrid(std::move(eps)),
                        number("tau"), integer("n"), integer("trials"), s};
  if (j.contains("b")) sc.b_override = number("b");
  if (j.contains("threads")) sc.threads = static_cast<int>(integer("threads"));
  return sc;
}

std::string ErrorRateReport::to_csv() const {
  std::string out = "hypothesis,trials,errors,rate,wilson_low,wilson_high,copies_used\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%lld,%lld,%.17g,%.17g,%.17g,%lld\n", r.hypothesis, r.trials, r.errors,
                  r.rate, r.wilson_low, r.wilson_high, r.copies_used);
    out += buf;
  }
  return out;
}

ErrorRateReport simulate_error_rates(const HypothesisScenario& sc) {
  if (sc.trials < 1) throw ParameterError("simulate_error_rates needs trials >= 1");
  if (sc.n < 1) throw ParameterError("simulate_error_rates needs n >= 1");
  if (!(sc.tau > 0.0 && sc.tau < 1.0)) throw ParameterError("tau must lie in (0,1)");
  const int m = sc.grid.hypothesis_count();
  if (static_cast<int>(sc.states.size()) != m) {
    std::ostringstream os;
    os << "scenario has " << sc.states.size() << " states but " << m << " hypotheses";
    throw ParameterError(os.str());
  }
  const int d = sc.sigma.dim();
  int qubits = 0;
  while ((1 << qubits) < d) ++qubits;
  if ((1 << qubits) != d) throw ParameterError("state dimension must be a power of two");
  for (const auto& s : sc.states) {
    if (s.dim() != d) throw ParameterError("all scenario states must share sigma's dimension");
  }

  std::vector<DensityOperator> all = sc.states;
  all.push_back(sc.sigma);
  double b = min_eigenvalue_bound(all);
  if (sc.b_override) {
    if (!(*sc.b_override > 0.0 && *sc.b_override <= b)) {
      throw ParameterError("b override must lie in (0, min eigenvalue of the scenario states]");
    }
    b = *sc.b_override;
  }
  const auto& eps = sc.grid.epsilons();
  std::vector<double> divergences;
  for (int i = 0; i < m; ++i) {
    const double dv = umegaki(sc.states[i], sc.sigma).value();
    if (!(eps[i] < dv && dv <= eps[i + 1])) {
      std::ostringstream os;
      os << "state " << i << " has D(rho||sigma) = " << dv << ", outside (" << eps[i] << ", " << eps[i + 1] << "]";
      throw ParameterError(os.str());
    }
    divergences.push_back(dv);
  }

  const double c = threshold_c(sc.tau, d, b);
  const PauliBasisSet basis = build_pauli_basis(qubits);
  ErrorRateReport report{c, b, c / std::sqrt(static_cast<double>(sc.n)), {}};
  for (int i = 0; i < m; ++i) {
    std::vector<char> wrong(static_cast<std::size_t>(sc.trials), 0);
    parallel_for(wrong.size(), sc.threads, [&](std::size_t t) {
      const std::uint64_t s = derive_seed(sc.seed, {0x48595054ULL, static_cast<std::uint64_t>(i), t});
      const DensityOperator est = estimate_rho(sample_record(sc.states[i], basis, sc.n, s), basis);
      const TestOutcome o = decide(umegaki(est, sc.sigma).value(), sc.n, sc.grid, c);
      wrong[t] = (!o.decided_index || *o.decided_index != i) ? 1 : 0;
    });
    long long errors = 0;
    for (char w : wrong) errors += w;
    const WilsonInterval wi = wilson_interval(errors, sc.trials);
    report.rows.push_back({i, sc.trials, errors, static_cast<double>(errors) / sc.trials, wi.low, wi.high,
                           sc.n * (static_cast<long long>(d) * d - 1), divergences[i],
                           variance_v1(sc.states[i], sc.sigma, basis)});
  }
  return report;
}

}  // namespace qasym
