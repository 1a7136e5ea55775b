#include "qasym/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qasym/divergences.hpp"
#include "qasym/errors.hpp"
#include "qasym/experiments.hpp"
#include "qasym/hypothesis_testing.hpp"
#include "qasym/limit_laws.hpp"
#include "qasym/matrix_io.hpp"
#include "qasym/pauli_tomography.hpp"

namespace qasym {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParameterError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw NumericError("write to '" + path + "' failed");
}

int qubits_for(int d) {
  int q = 0;
  while ((1 << q) < d) ++q;
  if ((1 << q) != d) throw ParameterError("state dimension must be a power of two");
  return q;
}

json value_json(const DivergenceValue& v) {
  if (v.is_infinite()) return "inf";
  return v.value();
}

std::vector<Povm> load_povms(const std::string& path) {
  const json j = load_json_file(path);
  if (!j.is_array() || j.empty()) throw ParameterError("POVM file must hold a non-empty array");
  // a bare POVM is an array of matrices; a family is an array of arrays
  std::vector<Povm> out;
  if (j[0].is_object()) {
    out.push_back(povm_from_json(j));
  } else {
    for (const auto& m : j) out.push_back(povm_from_json(m));
  }
  return out;
}

struct DivergenceOpts {
  std::string kind, rho, sigma, povms;
  std::optional<double> alpha;
};

void run_divergence(const DivergenceOpts& o, std::ostream& out) {
  const DensityOperator rho = density_from_json(load_json_file(o.rho));
  json res{{"name", o.kind}};
  if (o.kind == "entropy") {
    res["value"] = von_neumann_entropy(rho);
    res["support_ok"] = true;
    out << res.dump() << "\n";
    return;
  }
  if (o.sigma.empty()) throw ParameterError("--sigma is required for " + o.kind);
  const DensityOperator sigma = density_from_json(load_json_file(o.sigma));
  auto need_alpha = [&] {
    if (!o.alpha) throw ParameterError("--alpha is required for " + o.kind);
    res["alpha"] = *o.alpha;
    return *o.alpha;
  };
  std::optional<DivergenceValue> v;
  if (o.kind == "umegaki") {
    v = umegaki(rho, sigma);
  } else if (o.kind == "petz") {
    v = petz_renyi(rho, sigma, need_alpha());
  } else if (o.kind == "sandwiched") {
    v = sandwiched_renyi(rho, sigma, need_alpha());
  } else if (o.kind == "fidelity") {
    v = DivergenceValue::finite(fidelity(rho, sigma));
  } else if (o.kind == "maxdiv") {
    v = max_divergence(rho, sigma);
  } else if (o.kind == "measured") {
    if (o.povms.empty()) throw ParameterError("--povms is required for measured");
    const MeasuredResult m = measured_relative_entropy(rho, sigma, load_povms(o.povms));
    v = m.value;
    res["argmax"] = m.argmax;
    res["near_max"] = m.near_max;
  } else {
    throw ParameterError("unknown divergence kind '" + o.kind + "'");
  }
  res["value"] = value_json(*v);
  res["support_ok"] = v->support_ok();
  out << res.dump() << "\n";
}

void run_limit_eval(const std::string& bundle_path, std::ostream& out) {
  const json b = load_json_file(bundle_path);
  if (!b.is_object()) throw ParameterError("bundle must be a JSON object");
  if (!b.contains("functional") || !b["functional"].is_string()) {
    throw ParameterError("bundle needs a string 'functional'");
  }
  if (!b.contains("rho")) throw ParameterError("bundle needs 'rho'");
  const std::string f = b["functional"].get<std::string>();
  const DensityOperator rho = density_from_json(b["rho"]);
  const int d = rho.dim();
  auto direction = [&](const char* key) {
    return b.contains(key) ? LimitDirection(operator_from_json(b[key])) : LimitDirection::zero(d);
  };
  const LimitDirection l1 = direction("L1");
  const LimitDirection l2 = direction("L2");
  if (l1.dim() != d || l2.dim() != d) throw ParameterError("bundle directions do not match rho's dimension");
  auto sigma = [&] {
    if (!b.contains("sigma")) throw ParameterError("functional '" + f + "' needs 'sigma'");
    const DensityOperator s = density_from_json(b["sigma"]);
    if (s.dim() != d) throw ParameterError("rho and sigma dimensions differ");
    return s;
  };
  auto alpha = [&] {
    if (!b.contains("alpha") || !b["alpha"].is_number()) throw ParameterError("functional '" + f + "' needs 'alpha'");
    return b["alpha"].get<double>();
  };
  double v = 0.0;
  if (f == "qre_alt") v = qre_alt_limit(rho, sigma(), l1, l2);
  else if (f == "qre_null") v = qre_null_limit(rho, l1, l2);
  else if (f == "vn_entropy") v = vn_entropy_limit(rho, l1);
  else if (f == "petz_alt") v = petz_alt_limit(rho, sigma(), alpha(), l1, l2);
  else if (f == "petz_null") v = petz_null_limit(rho, alpha(), l1, l2);
  else if (f == "sandwiched_alt") v = sandwiched_alt_limit(rho, sigma(), alpha(), l1, l2);
  else if (f == "fidelity") v = fidelity_limit(rho, sigma(), l1, l2);
  else if (f == "maxdiv") v = maxdiv_limit(rho, sigma(), l1, l2);
  else if (f == "measured_alt") {
    if (!b.contains("povm")) throw ParameterError("measured_alt needs 'povm'");
    v = measured_alt_limit(rho, sigma(), povm_from_json(b["povm"]), l1, l2);
  } else {
    throw ParameterError("unknown functional '" + f + "'");
  }
  out << fmt17(v) << "\n";
}

struct TomographyOpts {
  std::string rho, record, out, estimator = "rho";
  std::optional<long long> n;
  std::optional<std::uint64_t> seed;
  bool per_shot = false;
};

void run_tomography(const TomographyOpts& o, std::ostream& out) {
  MeasurementRecord rec;
  int d = 0;
  if (!o.record.empty()) {
    if (!o.rho.empty()) throw ParameterError("give either --record or --rho, not both");
    rec = MeasurementRecord::from_json(load_json_file(o.record));
    // d^2 - 1 counts
    const std::size_t m = rec.plus_counts.size() + 1;
    while (static_cast<std::size_t>(d) * d < m) ++d;
    if (static_cast<std::size_t>(d) * d != m) throw ParameterError("record length is not d^2 - 1");
  } else {
    if (o.rho.empty()) throw ParameterError("tomography needs --rho (to sample) or --record");
    if (!o.seed) throw ParameterError("--seed is required when sampling");
    if (!o.n) throw ParameterError("--n is required when sampling");
    const DensityOperator rho = density_from_json(load_json_file(o.rho));
    d = rho.dim();
    rec = sample_record(rho, build_pauli_basis(qubits_for(d)), *o.n, *o.seed,
                        o.per_shot ? SamplingMode::PerShot : SamplingMode::Binomial);
  }
  const PauliBasisSet basis = build_pauli_basis(qubits_for(d));
  const TomographyEstimate est =
      o.estimator == "sigma" ? estimate_sigma_detailed(rec, basis) : estimate_rho_detailed(rec, basis);
  const json res{{"record", rec.to_json()},
                 {"estimator", o.estimator},
                 {"estimate", operator_to_json(est.state.op())},
                 {"projected", est.projected}};
  if (!o.out.empty()) write_text(o.out, res.dump(2) + "\n");
  out << res.dump() << "\n";
}

struct ExperimentOpts {
  std::string config, kind, rho, sigma, out, povms, id;
  std::optional<double> alpha, exponent;
  std::vector<long long> n;
  std::optional<long long> trials, reference_draws;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool two_sample = false;
};

json inline_config(const ExperimentOpts& o) {
  if (o.kind.empty()) throw ParameterError("give --config or --kind");
  json j{{"kind", o.kind}};
  if (!o.id.empty()) j["experiment_id"] = o.id;
  if (!o.rho.empty()) j["rho"] = load_json_file(o.rho);
  if (!o.sigma.empty()) j["sigma"] = load_json_file(o.sigma);
  if (o.alpha) j["alpha"] = *o.alpha;
  if (o.exponent) j["scaling_exponent"] = *o.exponent;
  if (!o.n.empty()) j["n_grid"] = o.n;
  if (o.trials) j["trials"] = *o.trials;
  if (o.reference_draws) j["reference_draws"] = *o.reference_draws;
  if (o.two_sample) j["two_sample"] = true;
  if (!o.povms.empty()) {
    json fam = json::array();
    for (const auto& m : load_povms(o.povms)) fam.push_back(povm_to_json(m));
    j["povms"] = fam;
  }
  return j;
}

void run_experiment(const ExperimentOpts& o, std::ostream& out) {
  json j;
  if (!o.config.empty()) {
    if (!o.kind.empty()) throw ParameterError("--config and --kind are mutually exclusive");
    j = load_json_file(o.config);
  } else {
    j = inline_config(o);
  }
  if (j.is_object()) {
    if (!o.out.empty()) j["out"] = o.out;
    if (o.threads) j["threads"] = *o.threads;
  }
  const ExperimentConfig cfg = config_from_json(j, o.seed);
  if (cfg.kind == ExperimentKind::HypothesisTest) {
    const std::string csv = simulate_error_rates(*cfg.scenario).to_csv();
    if (cfg.output_path.empty()) out << csv;
    else write_text(cfg.output_path, csv);
    return;
  }
  const ExperimentResult r = run_convergence_experiment(cfg);
  const std::string summary = r.summary_json().dump(2) + "\n";
  if (!cfg.output_path.empty()) {
    write_text(cfg.output_path, r.records_csv());
    write_text(cfg.output_path + ".summary.json", summary);
    out << summary;
  } else {
    out << r.records_csv();
  }
}

struct HypothesisOpts {
  std::string scenario, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void run_hypothesis(const HypothesisOpts& o, std::ostream& out) {
  HypothesisScenario sc = scenario_from_json(load_json_file(o.scenario), o.seed);
  if (o.threads) sc.threads = *o.threads;
  const std::string csv = simulate_error_rates(sc).to_csv();
  if (o.out.empty()) out << csv;
  else write_text(o.out, csv);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymptotics of quantum divergence estimators"};
  app.require_subcommand(1);

  DivergenceOpts div;
  auto* c_div = app.add_subcommand("divergence", "Evaluate a divergence between two states");
  c_div->add_option("--kind", div.kind, "umegaki|entropy|petz|sandwiched|fidelity|maxdiv|measured")->required();
  c_div->add_option("--rho", div.rho, "rho matrix JSON")->required();
  c_div->add_option("--sigma", div.sigma, "sigma matrix JSON");
  c_div->add_option("--alpha", div.alpha);
  c_div->add_option("--povms", div.povms, "POVM or POVM family JSON");

  std::string bundle;
  auto* c_lim = app.add_subcommand("limit", "Limit functionals");
  c_lim->require_subcommand(1);
  auto* c_eval = c_lim->add_subcommand("eval", "Evaluate a limit functional on a bundle");
  c_eval->add_option("--bundle", bundle)->required();

  TomographyOpts tom;
  auto* c_tom = app.add_subcommand("tomography", "Sample a Pauli record and reconstruct");
  c_tom->add_option("--rho", tom.rho);
  c_tom->add_option("--record", tom.record, "existing record JSON instead of sampling");
  c_tom->add_option("--n", tom.n);
  c_tom->add_option("--seed", tom.seed);
  c_tom->add_option("--estimator", tom.estimator)->check(CLI::IsMember({"rho", "sigma"}));
  c_tom->add_flag("--per-shot", tom.per_shot);
  c_tom->add_option("--out", tom.out);

  ExperimentOpts ex;
  auto* c_ex = app.add_subcommand("experiment", "Run a seeded convergence experiment");
  c_ex->add_option("--config", ex.config);
  c_ex->add_option("--kind", ex.kind);
  c_ex->add_option("--id", ex.id);
  c_ex->add_option("--rho", ex.rho);
  c_ex->add_option("--sigma", ex.sigma);
  c_ex->add_option("--alpha", ex.alpha);
  c_ex->add_option("--n", ex.n)->expected(1, -1);
  c_ex->add_option("--trials", ex.trials);
  c_ex->add_option("--exponent", ex.exponent);
  c_ex->add_option("--reference-draws", ex.reference_draws);
  c_ex->add_option("--povms", ex.povms);
  c_ex->add_flag("--two-sample", ex.two_sample);
  c_ex->add_option("--seed", ex.seed);
  c_ex->add_option("--out", ex.out);
  c_ex->add_option("--threads", ex.threads);

  HypothesisOpts hyp;
  auto* c_hyp = app.add_subcommand("hypothesis", "Simulate composite-hypothesis error rates");
  c_hyp->add_option("--scenario", hyp.scenario)->required();
  c_hyp->add_option("--seed", hyp.seed);
  c_hyp->add_option("--out", hyp.out);
  c_hyp->add_option("--threads", hyp.threads);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_div->parsed()) run_divergence(div, out);
    else if (c_eval->parsed()) run_limit_eval(bundle, out);
    else if (c_tom->parsed()) run_tomography(tom, out);
    else if (c_ex->parsed()) run_experiment(ex, out);
    else if (c_hyp->parsed()) run_hypothesis(hyp, out);
    return 0;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace qasym
