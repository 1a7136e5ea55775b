#include "qasym/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "qasym/errors.hpp"
#include "qasym/limit_laws.hpp"
#include "qasym/matrix_io.hpp"
#include "qasym/parallel.hpp"
#include "qasym/rng.hpp"

namespace qasym {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::OneSampleAlt, "one_sample_alt"},   {ExperimentKind::TwoSampleAlt, "two_sample_alt"},
    {ExperimentKind::OneSampleNull, "one_sample_null"}, {ExperimentKind::TwoSampleNull, "two_sample_null"},
    {ExperimentKind::Petz, "petz"},                     {ExperimentKind::Sandwiched, "sandwiched"},
    {ExperimentKind::Measured, "measured"},             {ExperimentKind::HypothesisTest, "hypothesis_test"},
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int qubits_for(int d) {
  int q = 0;
  while ((1 << q) < d) ++q;
  if ((1 << q) != d || q < 1 || q > kMaxQubits) {
    std::ostringstream os;
    os << "state dimension " << d << " is not 2^N with 1 <= N <= " << kMaxQubits;
    throw ParameterError(os.str());
  }
  return q;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& e : kKindNames) {
    if (e.kind == k) return e.name;
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (const auto& e : kKindNames) {
    if (s == e.name) return e.kind;
  }
  throw ParameterError("unknown experiment kind '" + s + "'");
}

bool is_null_kind(ExperimentKind k) {
  return k == ExperimentKind::OneSampleNull || k == ExperimentKind::TwoSampleNull;
}

void ExperimentConfig::validate() const {
  if (experiment_id.empty() || experiment_id.find_first_of(",\n\r\"") != std::string::npos) {
    throw ParameterError("experiment_id must be non-empty and free of commas, quotes and newlines");
  }
  if (threads < 1) throw ParameterError("threads must be >= 1");
  if (kind == ExperimentKind::HypothesisTest) {
    if (!scenario) throw ParameterError("hypothesis_test needs a scenario");
    return;
  }
  if (!rho) throw ParameterError("experiment needs a rho state");
  qubits_for(rho->dim());
  if (n_grid.empty()) throw ParameterError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw ParameterError("n_grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ParameterError("n_grid must be strictly ascending");
  }
  if (trials < 100) {
    std::ostringstream os;
    os << "trials must be >= 100 for KS comparisons, got " << trials;
    throw ParameterError(os.str());
  }
  if (!(scaling_exponent > 0.0) || !std::isfinite(scaling_exponent)) {
    throw ParameterError("scaling_exponent must be positive");
  }
  if (!(min_eigenvalue(*rho) > 0.0)) throw ParameterError("rho must be strictly positive");
  if (is_null_kind(kind)) {
    if (sigma && max_abs(sigma->matrix() - rho->matrix()) > 1e-12) {
      throw ParameterError("null kinds require sigma = rho");
    }
    if (reference_draws < 100) throw ParameterError("reference_draws must be >= 100");
    return;
  }
  if (!sigma) throw ParameterError("alternative kinds need a sigma state");
  if (sigma->dim() != rho->dim()) throw ParameterError("rho and sigma dimensions differ");
  if (!(min_eigenvalue(*sigma) > 0.0)) throw ParameterError("sigma must be strictly positive");
  if (kind == ExperimentKind::Petz) {
    if (!alpha || !((*alpha > 0.0 && *alpha < 1.0) || (*alpha > 1.0 && *alpha <= 2.0))) {
      throw ParameterError("petz experiments need alpha in (0,1) u (1,2]");
    }
  }
  if (kind == ExperimentKind::Sandwiched) {
    if (!alpha || !((*alpha >= 0.5 && *alpha < 1.0) || (*alpha > 1.0 && std::isfinite(*alpha)))) {
      throw ParameterError("sandwiched experiments need alpha in [1/2,1) u (1,inf)");
    }
  }
  if (kind == ExperimentKind::Measured) {
    if (povms.empty()) throw ParameterError("measured experiments need a non-empty POVM family");
    for (const auto& m : povms) {
      if (m.dim() != rho->dim()) throw ParameterError("POVM dimension does not match the states");
    }
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed) {
  if (!j.is_object()) throw ParameterError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  auto number = [&](const char* key) {
    if (!j[key].is_number()) throw ParameterError(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
  };
  auto integer = [&](const char* key) {
    if (!j[key].is_number_integer()) throw ParameterError(std::string("'") + key + "' must be an integer");
    return j[key].get<long long>();
  };
  if (!j.contains("kind") || !j["kind"].is_string()) throw ParameterError("config needs a string 'kind'");
  cfg.kind = experiment_kind_from_string(j["kind"].get<std::string>());
  if (j.contains("experiment_id")) {
    if (!j["experiment_id"].is_string()) throw ParameterError("'experiment_id' must be a string");
    cfg.experiment_id = j["experiment_id"].get<std::string>();
  }
  if (seed) {
    cfg.seed = *seed;
  } else if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw ParameterError("'seed' must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  } else {
    throw ParameterError("a seed is required (config field 'seed' or --seed)");
  }
  if (j.contains("output_path")) cfg.output_path = j["output_path"].get<std::string>();
  if (j.contains("out")) cfg.output_path = j["out"].get<std::string>();
  if (j.contains("threads")) cfg.threads = static_cast<int>(integer("threads"));

  if (cfg.kind == ExperimentKind::HypothesisTest) {
    if (!j.contains("scenario")) throw ParameterError("hypothesis_test config needs a 'scenario' object");
    cfg.scenario = scenario_from_json(j["scenario"], cfg.seed);
    cfg.scenario->threads = cfg.threads;
    cfg.validate();
    return cfg;
  }
  if (j.contains("rho")) cfg.rho = density_from_json(j["rho"]);
  if (j.contains("sigma")) cfg.sigma = density_from_json(j["sigma"]);
  if (j.contains("alpha")) cfg.alpha = number("alpha");
  if (j.contains("n_grid")) {
    if (!j["n_grid"].is_array()) throw ParameterError("'n_grid' must be an array");
    cfg.n_grid.clear();
    for (const auto& v : j["n_grid"]) {
      if (!v.is_number_integer()) throw ParameterError("'n_grid' entries must be integers");
      cfg.n_grid.push_back(v.get<long long>());
    }
  }
  if (j.contains("trials")) cfg.trials = integer("trials");
  if (j.contains("scaling_exponent")) cfg.scaling_exponent = number("scaling_exponent");
  if (j.contains("reference_draws")) cfg.reference_draws = integer("reference_draws");
  if (j.contains("two_sample")) {
    if (!j["two_sample"].is_boolean()) throw ParameterError("'two_sample' must be a boolean");
    cfg.two_sample = j["two_sample"].get<bool>();
  }
  if (j.contains("povms")) {
    if (!j["povms"].is_array()) throw ParameterError("'povms' must be an array of POVMs");
    for (const auto& m : j["povms"]) cfg.povms.push_back(povm_from_json(m));
  }
  cfg.validate();
  return cfg;
}

std::string format_trial_row(const TrialRecord& r) {
  std::string out = r.experiment_id + "," + r.kind + "," + std::to_string(r.d) + ",";
  if (r.alpha) out += fmt17(*r.alpha);
  out += "," + std::to_string(r.n) + "," + std::to_string(r.trial) + "," + fmt17(r.statistic) + "," +
         (r.branch_taken ? "1" : "0");
  return out;
}

TrialRecord parse_trial_row(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      f.push_back(cur);
      cur.clear();
    } else if (ch != '\r' && ch != '\n') {
      cur += ch;
    }
  }
  f.push_back(cur);
  if (f.size() != 8) {
    std::ostringstream os;
    os << "trial row needs 8 fields, got " << f.size();
    throw ParameterError(os.str());
  }
  TrialRecord r;
  try {
    std::size_t used = 0;
    auto whole = [&](const std::string& s) {
      if (used != s.size()) throw ParameterError("trailing characters in field '" + s + "'");
    };
    r.experiment_id = f[0];
    r.kind = f[1];
    experiment_kind_from_string(r.kind);
    r.d = std::stoi(f[2], &used);
    whole(f[2]);
    if (!f[3].empty()) {
      r.alpha = std::stod(f[3], &used);
      whole(f[3]);
    }
    r.n = std::stoll(f[4], &used);
    whole(f[4]);
    r.trial = std::stoll(f[5], &used);
    whole(f[5]);
    r.statistic = std::stod(f[6], &used);
    whole(f[6]);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ParameterError*>(&e)) throw;
    throw ParameterError(std::string("malformed trial row: ") + e.what());
  }
  if (f[7] != "0" && f[7] != "1") throw ParameterError("branch_taken must be 0 or 1");
  r.branch_taken = f[7] == "1";
  if (!std::isfinite(r.statistic)) throw ParameterError("trial statistic must be finite");
  return r;
}

nlohmann::json SummaryRow::to_json() const {
  return nlohmann::json{{"kind", kind}, {"n", n},   {"mean", mean},    {"var", var},
                        {"v_pred", v_pred}, {"ks", ks}, {"trials", trials}};
}

std::string ExperimentResult::records_csv() const {
  std::string out = std::string(kTrialCsvHeader) + "\n";
  for (const auto& r : records) out += format_trial_row(r) + "\n";
  return out;
}

nlohmann::json ExperimentResult::summary_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : summary) arr.push_back(s.to_json());
  return arr;
}

double sample_mean(const std::vector<double>& x) {
  if (x.empty()) throw ParameterError("sample_mean of an empty sample");
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) throw ParameterError("sample_variance needs at least two values");
  const double m = sample_mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size() - 1);
}

double ks_statistic(std::vector<double> sample, const GaussianReference& ref) {
  if (sample.size() < 2) throw ParameterError("ks_statistic needs at least two sample values");
  if (!(ref.var > 0.0) || !std::isfinite(ref.var)) throw ParameterError("gaussian reference needs var > 0");
  std::sort(sample.begin(), sample.end());
  const double sd = std::sqrt(ref.var);
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-(sample[i] - ref.mean) / (sd * std::numbers::sqrt2));
    worst = std::max({worst, (i + 1) / n - cdf, cdf - i / n});
  }
  return worst;
}

double ks_statistic(std::vector<double> sample, std::vector<double> reference) {
  if (sample.size() < 2 || reference.size() < 2) throw ParameterError("ks_statistic needs two samples of size >= 2");
  std::sort(sample.begin(), sample.end());
  std::sort(reference.begin(), reference.end());
  const double na = static_cast<double>(sample.size());
  const double nb = static_cast<double>(reference.size());
  std::size_t i = 0;
  std::size_t k = 0;
  double worst = 0.0;
  while (i < sample.size() && k < reference.size()) {
    const double x = std::min(sample[i], reference[k]);
    while (i < sample.size() && sample[i] <= x) ++i;
    while (k < reference.size() && reference[k] <= x) ++k;
    worst = std::max(worst, std::abs(i / na - k / nb));
  }
  return worst;
}

double predicted_linear_variance(const DensityOperator& rho, const DensityOperator& sigma,
                                 const PauliBasisSet& basis, bool two_sample,
                                 const std::function<double(const HermitianOperator&, const HermitianOperator&)>& f) {
  const HermitianOperator zero = HermitianOperator::zero(basis.dim());
  const RealVector wr = limit_coefficient_variances(rho, basis);
  double acc = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const double v = f(basis.op(j), zero);
    acc += wr[j] * v * v;
  }
  if (two_sample) {
    const RealVector ws = limit_coefficient_variances(sigma, basis);
    for (int j = 0; j < basis.size(); ++j) {
      const double v = f(zero, basis.op(j));
      acc += ws[j] * v * v;
    }
  }
  return acc;
}

namespace {

struct Plan {
  bool null_kind = false;
  bool sample_sigma = false;
  double truth = 0.0;
  /// Variance of the statistic at r_n = sqrt(n) (alternative kinds).
  double v_sqrt_n = 0.0;
  std::function<double(const DensityOperator&, const DensityOperator&)> divergence;
};

Plan make_plan(const ExperimentConfig& cfg, const PauliBasisSet& basis) {
  const DensityOperator& rho = *cfg.rho;
  const DensityOperator sigma = cfg.sigma ? *cfg.sigma : rho;
  Plan p;
  p.null_kind = is_null_kind(cfg.kind);
  auto dir = [](const HermitianOperator& h) { return LimitDirection(h); };
  switch (cfg.kind) {
    case ExperimentKind::OneSampleAlt:
    case ExperimentKind::TwoSampleAlt:
      p.sample_sigma = cfg.kind == ExperimentKind::TwoSampleAlt;
      p.divergence = [](const DensityOperator& a, const DensityOperator& b) { return umegaki(a, b).value(); };
      p.v_sqrt_n = p.sample_sigma ? variance_v2(rho, sigma, basis) : variance_v1(rho, sigma, basis);
      break;
    case ExperimentKind::OneSampleNull:
    case ExperimentKind::TwoSampleNull:
      p.sample_sigma = cfg.kind == ExperimentKind::TwoSampleNull;
      p.divergence = [](const DensityOperator& a, const DensityOperator& b) { return umegaki(a, b).value(); };
      break;
    case ExperimentKind::Petz: {
      const double a = *cfg.alpha;
      p.sample_sigma = cfg.two_sample;
      p.divergence = [a](const DensityOperator& x, const DensityOperator& y) { return petz_renyi(x, y, a).value(); };
      p.v_sqrt_n = predicted_linear_variance(rho, sigma, basis, p.sample_sigma, [&](const auto& l1, const auto& l2) {
        return petz_alt_limit(rho, sigma, a, dir(l1), dir(l2));
      });
      break;
    }
    case ExperimentKind::Sandwiched: {
      const double a = *cfg.alpha;
      p.sample_sigma = cfg.two_sample;
      p.divergence = [a](const DensityOperator& x, const DensityOperator& y) {
        return sandwiched_renyi(x, y, a).value();
      };
      p.v_sqrt_n = predicted_linear_variance(rho, sigma, basis, p.sample_sigma, [&](const auto& l1, const auto& l2) {
        return sandwiched_alt_limit(rho, sigma, a, dir(l1), dir(l2));
      });
      break;
    }
    case ExperimentKind::Measured: {
      p.sample_sigma = cfg.two_sample;
      const std::vector<Povm> fam = cfg.povms;
      p.divergence = [fam](const DensityOperator& x, const DensityOperator& y) {
        return measured_relative_entropy(x, y, fam).value.value();
      };
      const Povm& star = cfg.povms[measured_relative_entropy(rho, sigma, cfg.povms).argmax];
      p.v_sqrt_n = predicted_linear_variance(rho, sigma, basis, p.sample_sigma, [&](const auto& l1, const auto& l2) {
        return measured_alt_limit(rho, sigma, star, dir(l1), dir(l2));
      });
      break;
    }
    case ExperimentKind::HypothesisTest:
      throw ParameterError("hypothesis_test is not a convergence experiment");
  }
  p.truth = p.null_kind ? 0.0 : p.divergence(rho, sigma);
  return p;
}

}  // namespace

ExperimentResult run_convergence_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind == ExperimentKind::HypothesisTest) {
    throw ParameterError("hypothesis_test is not a convergence experiment");
  }
  const DensityOperator& rho = *cfg.rho;
  const DensityOperator sigma = cfg.sigma ? *cfg.sigma : rho;
  const int d = rho.dim();
  const PauliBasisSet basis = build_pauli_basis(qubits_for(d));
  const Plan plan = make_plan(cfg, basis);
  const std::uint64_t tag = 0x45585000ULL + static_cast<std::uint64_t>(cfg.kind);
  const std::string kind = to_string(cfg.kind);

  ExperimentResult result;
  if (plan.null_kind) {
    result.reference.resize(static_cast<std::size_t>(cfg.reference_draws));
    parallel_for(result.reference.size(), cfg.threads, [&](std::size_t t) {
      std::mt19937_64 gen = substream(cfg.seed, {tag, 0x524546ULL, t});
      const LimitDirection l1(sample_gaussian_limit(rho, basis, gen));
      const LimitDirection l2 =
          plan.sample_sigma ? LimitDirection(sample_gaussian_limit(rho, basis, gen)) : LimitDirection::zero(d);
      result.reference[t] = qre_null_limit(rho, l1, l2);
    });
  }

  for (long long n : cfg.n_grid) {
    const double nn = static_cast<double>(n);
    const double rn = std::pow(nn, cfg.scaling_exponent);
    // Limit-law variance at the configured rate: r_n = n^e differs from sqrt(n) by n^(e - 1/2).
    const double law_scale = std::pow(nn, 2.0 * cfg.scaling_exponent - 1.0);
    std::vector<TrialRecord> rows(static_cast<std::size_t>(cfg.trials));
    parallel_for(rows.size(), cfg.threads, [&](std::size_t t) {
      const auto trial = static_cast<std::uint64_t>(t);
      const auto un = static_cast<std::uint64_t>(n);
      const TomographyEstimate er =
          estimate_rho_detailed(sample_record(rho, basis, n, derive_seed(cfg.seed, {tag, un, trial, 0})), basis);
      bool projected = er.projected;
      double d_hat = 0.0;
      if (plan.sample_sigma) {
        const TomographyEstimate es = estimate_sigma_detailed(
            sample_record(sigma, basis, n, derive_seed(cfg.seed, {tag, un, trial, 1})), basis);
        projected = projected || es.projected;
        d_hat = plan.divergence(er.state, es.state);
      } else {
        d_hat = plan.divergence(er.state, sigma);
      }
      TrialRecord& r = rows[t];
      r.experiment_id = cfg.experiment_id;
      r.kind = kind;
      r.d = d;
      r.alpha = cfg.alpha;
      r.n = n;
      r.trial = static_cast<long long>(t);
      r.statistic = plan.null_kind ? rn * rn * d_hat : rn * (d_hat - plan.truth);
      r.branch_taken = projected;
    });

    std::vector<double> stats;
    stats.reserve(rows.size());
    for (const auto& r : rows) stats.push_back(r.statistic);
    SummaryRow s{kind, n, sample_mean(stats), sample_variance(stats), 0.0, 0.0, cfg.trials};
    if (plan.null_kind) {
      std::vector<double> ref = result.reference;
      for (double& v : ref) v *= law_scale;
      s.v_pred = sample_variance(ref);
      s.ks = ks_statistic(stats, ref);
    } else {
      s.v_pred = plan.v_sqrt_n * law_scale;
      s.ks = s.v_pred > 0.0 ? ks_statistic(stats, GaussianReference{0.0, s.v_pred}) : 1.0;
    }
    result.summary.push_back(s);
    for (auto& r : rows) result.records.push_back(std::move(r));
  }
  return result;
}

}  // namespace qasym
