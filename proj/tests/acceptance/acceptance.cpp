// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "qasym/divergences.hpp"
#include "qasym/experiments.hpp"
#include "qasym/frechet.hpp"
#include "qasym/hypothesis_testing.hpp"
#include "qasym/limit_laws.hpp"
#include "qasym/operator_core.hpp"
#include "qasym/pauli_tomography.hpp"

using namespace qasym;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream detail;
  int failures = 0;
  std::string first_failure;

  void fail(const std::string& what) {
    ok = false;
    if (failures++ == 0) first_failure = what;
  }
  void expect(bool cond, const std::string& what) {
    if (!cond) fail(what);
  }
};

DensityOperator shifted(const DensityOperator& r, const HermitianOperator& l, double t) {
  return DensityOperator(r.op() + l * t);
}

double lambda_min(const HermitianOperator& a) { return min_eigenvalue(a); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// ---------------------------------------------------------------------------

void frechet_correctness(Verdict& v) {
  std::mt19937_64 g(1001);
  const std::vector<ScalarFunction> fns{ScalarFunction::log(), ScalarFunction::power(0.3),
                                        ScalarFunction::power(0.5), ScalarFunction::power(1.5)};
  const int dims[] = {2, 4, 8};
  double worst_ratio_dev = 0.0, worst_quad = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int d = dims[i % 3];
    const HermitianOperator a = qtest::random_pd(d, g, 1e3);
    const HermitianOperator hr = qtest::random_hermitian(d, g);
    const HermitianOperator h = hr * (1.0 / eig_hermitian(hr).max_abs_eigenvalue());
    const double h0 = 0.05 * lambda_min(a);
    for (const auto& fn : fns) {
      const double e1 = finite_difference_check(fn, a, h, h0);
      const double e2 = finite_difference_check(fn, a, h, h0 / 2);
      const double e3 = finite_difference_check(fn, a, h, h0 / 4);
      for (double r : {e1 / e2, e2 / e3}) {
        worst_ratio_dev = std::max(worst_ratio_dev, std::abs(r - 4.0));
        v.expect(r >= 3.4 && r <= 4.6, fn.name() + " FD ratio " + fmt(r) + " at instance " + std::to_string(i));
      }
      const HermitianOperator dd = frechet1(a, fn, h);
      const HermitianOperator quad = fn.is_log() ? frechet1_log_quadrature(a, h).value
                                                 : frechet_power_quadrature(a, h, fn.exponent(), 1).value;
      const double err = qtest::max_abs_diff(dd, quad);
      worst_quad = std::max(worst_quad, err);
      v.expect(err <= 1e-6, fn.name() + " quadrature gap " + fmt(err) + " at instance " + std::to_string(i));
    }
  }
  v.detail << "max |ratio-4| " << fmt(worst_ratio_dev) << ", max quadrature gap " << fmt(worst_quad);
}

// ---------------------------------------------------------------------------

void divergence_identities(Verdict& v) {
  std::mt19937_64 g(2002);
  double eq3 = 0.0, fid = 0.0, comm = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int d = 2 + i % 3;
    const DensityOperator r = qtest::random_density(d, g), s = qtest::random_density(d, g);

    const double e = std::abs(von_neumann_entropy(r) + umegaki(r, DensityOperator::maximally_mixed(d)).value() -
                              std::log(static_cast<double>(d)));
    eq3 = std::max(eq3, e);
    v.expect(e <= 1e-10, "entropy identity " + fmt(e));

    const double f = std::abs(sandwiched_renyi(r, s, 0.5).value() + std::log(fidelity(r, s)));
    fid = std::max(fid, f);
    v.expect(f <= 1e-9, "sandwiched(1/2) vs fidelity " + fmt(f));

    // commuting pair in a random common eigenbasis
    const DensityOperator pd = qtest::random_diagonal_density(d, g), qd = qtest::random_diagonal_density(d, g);
    const RealVector p = pd.matrix().diagonal().real(), q = qd.matrix().diagonal().real();
    const Matrix u = qtest::haar_unitary(d, g);
    const DensityOperator pc(HermitianOperator::hermitian_part(u * pd.matrix() * u.adjoint()));
    const DensityOperator qc(HermitianOperator::hermitian_part(u * qd.matrix() * u.adjoint()));
    std::vector<double> gaps{std::abs(umegaki(pc, qc).value() - classical_kl(p, q).value()),
                             std::abs(max_divergence(pc, qc).value() - std::log((p.array() / q.array()).maxCoeff())),
                             std::abs(fidelity(pc, qc) - std::pow((p.array() * q.array()).sqrt().sum(), 2))};
    for (double a : {0.5, 0.75, 1.5, 2.0}) {
      const double c = classical_renyi(p, q, a).value();
      gaps.push_back(std::abs(petz_renyi(pc, qc, a).value() - c));
      gaps.push_back(std::abs(sandwiched_renyi(pc, qc, a).value() - c));
    }
    for (double x : gaps) {
      comm = std::max(comm, x);
      v.expect(x <= 1e-9, "commuting vs classical " + fmt(x));
    }

    // orderings
    std::vector<Povm> fam{Povm::computational_basis(d), Povm::projective(r), Povm::projective(s)};
    for (int k = 0; k < 3; ++k) fam.push_back(Povm::projective(qtest::random_hermitian(d, g)));
    const double dm = measured_relative_entropy(r, s, fam).value.value();
    const double du = umegaki(r, s).value();
    const double dx = max_divergence(r, s).value();
    v.expect(dm <= du + 1e-10, "measured > umegaki");
    v.expect(du <= dx + 1e-10, "umegaki > max-divergence");
    for (double a : {0.5, 0.75, 1.5, 2.0}) {
      v.expect(sandwiched_renyi(r, s, a).value() <= petz_renyi(r, s, a).value() + 1e-10,
               "sandwiched > petz at alpha " + fmt(a));
    }
  }
  v.detail << "entropy identity " << fmt(eq3) << ", fidelity " << fmt(fid) << ", commuting " << fmt(comm)
           << ", orderings on 200 pairs";
}

// ---------------------------------------------------------------------------

struct TaylorCase {
  std::string name;
  bool null;
  // divergence at the perturbed pair
  std::function<double(const DensityOperator&, const DensityOperator&)> value;
  std::function<double(const DensityOperator&, const DensityOperator&, const LimitDirection&, const LimitDirection&)>
      limit;
};

void taylor_consistency(Verdict& v) {
  auto dv = [](DivergenceValue x) { return x.value(); };
  std::vector<TaylorCase> cases{
      {"qre_alt", false, [&](auto& r, auto& s) { return dv(umegaki(r, s)); },
       [](auto& r, auto& s, auto& a, auto& b) { return qre_alt_limit(r, s, a, b); }},
      {"qre_null", true, [&](auto& r, auto& s) { return dv(umegaki(r, s)); },
       [](auto& r, auto&, auto& a, auto& b) { return qre_null_limit(r, a, b); }},
      {"vn_entropy", false, [](auto& r, auto&) { return von_neumann_entropy(r); },
       [](auto& r, auto&, auto& a, auto&) { return vn_entropy_limit(r, a); }},
      {"fidelity", false, [](auto& r, auto& s) { return fidelity(r, s); },
       [](auto& r, auto& s, auto& a, auto& b) { return fidelity_limit(r, s, a, b); }},
      {"maxdiv", false, [&](auto& r, auto& s) { return dv(max_divergence(r, s)); },
       [](auto& r, auto& s, auto& a, auto& b) { return maxdiv_limit(r, s, a, b); }},
  };
  for (double a : {0.5, 1.5}) {
    cases.push_back({"petz_alt(" + fmt(a) + ")", false, [=](auto& r, auto& s) { return petz_renyi(r, s, a).value(); },
                     [=](auto& r, auto& s, auto& x, auto& y) { return petz_alt_limit(r, s, a, x, y); }});
    cases.push_back({"petz_null(" + fmt(a) + ")", true, [=](auto& r, auto& s) { return petz_renyi(r, s, a).value(); },
                     [=](auto& r, auto&, auto& x, auto& y) { return petz_null_limit(r, a, x, y); }});
  }
  for (double a : {0.75, 2.0}) {
    cases.push_back({"sandwiched_alt(" + fmt(a) + ")", false,
                     [=](auto& r, auto& s) { return sandwiched_renyi(r, s, a).value(); },
                     [=](auto& r, auto& s, auto& x, auto& y) { return sandwiched_alt_limit(r, s, a, x, y); }});
  }

  std::ostringstream summary;
  for (const auto& c : cases) {
    std::mt19937_64 g(3003);
    int exact = 0;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 50; ++i) {
      const int d = 2 + i % 3;
      const DensityOperator r = qtest::random_density(d, g), s = qtest::random_density(d, g);
      const LimitDirection l1(qtest::random_direction(d, g)), l2(qtest::random_direction(d, g));
      const DensityOperator& base2 = c.null ? r : s;
      const double f = c.limit(r, base2, l1, l2);
      const double t0 = 0.01 * std::min(lambda_min(r), lambda_min(base2));
      const double at0 = c.value(r, base2);
      auto at = [&](double t) { return c.value(shifted(r, l1.op(), t), shifted(base2, l2.op(), t)); };
      std::vector<double> rem, raw;
      for (double t : {t0, t0 / 2, t0 / 4}) {
        const double dt = at(t);
        raw.push_back(dt);
        rem.push_back(c.null ? std::abs(dt / (t * t) - f) : std::abs((dt - at0) / t - f));
      }
      const std::string where = c.name + " instance " + std::to_string(i);
      if (rem[0] <= 1e-9 * std::max(1.0, std::abs(f))) {
        ++exact;  // remainder already at rounding level
        continue;
      }
      for (int k = 0; k < 2; ++k) {
        // null: D(t) ~ t^2 F; the O(t) term of D/t^2 - F can cancel against O(t^2), so only
        // ask that it shrinks and ends small
        const double ratio = c.null ? raw[k] / raw[k + 1] : rem[k] / rem[k + 1];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        if (c.null) v.expect(ratio >= 3.4 && ratio <= 4.6, where + " t^2 ratio " + fmt(ratio));
        else v.expect(ratio >= 1.7 && ratio <= 2.3, where + " remainder ratio " + fmt(ratio));
      }
      if (c.null) {
        v.expect(rem[2] < rem[0], where + " remainder not shrinking");
        v.expect(rem[2] <= 1e-2 * std::abs(f), where + " D/t^2 misses the functional by " + fmt(rem[2]));
      }
    }
    summary << " " << c.name << "[" << fmt(lo) << "," << fmt(hi) << "]";
    if (exact) summary << "(" << exact << " exact)";
  }
  v.detail << "halving ratios (alt: remainder, null: D(t)/D(t/2))" << summary.str();
}

// ---------------------------------------------------------------------------

void commutative_reductions(Verdict& v) {
  std::mt19937_64 g(4004);
  std::normal_distribution<double> nd;
  auto diag_dir = [&](int d) {
    RealVector w(d);
    for (int i = 0; i < d; ++i) w[i] = nd(g);
    w.array() -= w.mean();
    w /= w.cwiseAbs().maxCoeff();
    return LimitDirection(HermitianOperator::diagonal(w));
  };
  double worst = 0.0;
  auto check = [&](double a, double b, const std::string& what) {
    const double e = std::abs(a - b);
    worst = std::max(worst, e);
    v.expect(e <= 1e-9, what + " gap " + fmt(e));
  };
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    const DensityOperator r = qtest::random_diagonal_density(d, g, 0.05), s = qtest::random_diagonal_density(d, g, 0.05);
    const LimitDirection l1 = diag_dir(d), l2 = diag_dir(d);
    check(qre_alt_limit(r, s, l1, l2), qre_alt_limit_commuting(r, s, l1, l2), "qre alt");
    check(qre_null_limit(r, l1, l2), qre_null_limit_commuting(r, l1, l2), "qre null");
    for (double a : {0.5, 1.5, 2.0}) {
      check(petz_alt_limit(r, s, a, l1, l2), petz_alt_limit_commuting(r, s, a, l1, l2), "petz alt");
      check(petz_null_limit(r, a, l1, l2), petz_null_limit_commuting(r, a, l1, l2), "petz null");
    }
    for (double a : {0.5, 0.75, 1.5, 2.0}) {
      check(sandwiched_alt_limit(r, s, a, l1, l2), petz_alt_limit_commuting(r, s, a, l1, l2), "sandwiched alt");
    }
  }
  v.detail << "max gap " << fmt(worst) << " over 100 diagonal instances";
}

// ---------------------------------------------------------------------------

void proposition1(Verdict& v) {
  std::mt19937_64 g(5005);
  std::ostringstream out;
  for (int i = 0; i < 5; ++i) {
    const DensityOperator r = qtest::random_density(2, g, 0.05), s = qtest::random_density(2, g, 0.05);
    for (auto kind : {ExperimentKind::OneSampleAlt, ExperimentKind::TwoSampleAlt}) {
      ExperimentConfig c;
      c.kind = kind;
      c.rho = r;
      c.sigma = s;
      c.n_grid = {10000};
      c.trials = 2000;
      c.seed = 5005 + 17 * static_cast<std::uint64_t>(i);
      c.threads = 4;
      const SummaryRow row = run_convergence_experiment(c).summary.at(0);
      const PauliBasisSet basis = build_pauli_basis(1);
      const double want = kind == ExperimentKind::OneSampleAlt ? variance_v1(r, s, basis) : variance_v2(r, s, basis);
      const double rel = std::abs(row.var - want) / want;
      const std::string where = "pair " + std::to_string(i) + " " + to_string(kind);
      v.expect(std::abs(row.v_pred - want) <= 1e-12 * want, where + " predicted variance mismatch");
      v.expect(rel <= 0.10, where + " variance off by " + fmt(rel));
      v.expect(row.ks <= 0.05, where + " KS " + fmt(row.ks));
      out << " " << (kind == ExperimentKind::OneSampleAlt ? "v1" : "v2") << "[" << fmt(rel) << "," << fmt(row.ks)
          << "]";
    }
  }
  v.detail << "(rel var err, KS):" << out.str();
}

// ---------------------------------------------------------------------------

void null_discrimination(Verdict& v) {
  std::mt19937_64 g(6006);
  const DensityOperator r = qtest::random_density(2, g, 0.05);
  auto run = [&](double e) {
    ExperimentConfig c;
    c.kind = ExperimentKind::OneSampleNull;
    c.rho = r;
    c.sigma = r;
    c.n_grid = {1000, 10000};
    c.trials = 2000;
    c.scaling_exponent = e;
    c.seed = 6006;
    c.threads = 4;
    return run_convergence_experiment(c).summary;
  };
  const auto right = run(0.5);
  const double ratio = std::max(right[0].var, right[1].var) / std::min(right[0].var, right[1].var);
  v.expect(ratio >= 0.5 && ratio <= 2.0, "n-scaled variance ratio " + fmt(ratio));
  v.expect(right[1].ks <= 0.08, "KS at n=1e4 " + fmt(right[1].ks));
  const auto wrong = run(0.25);
  const double bad = std::max(wrong[0].var, wrong[1].var) / std::min(wrong[0].var, wrong[1].var);
  v.expect(bad > 5.0, "sqrt(n)-scaled variance ratio only " + fmt(bad));
  v.detail << "n*D: var ratio " << fmt(ratio) << ", KS " << fmt(right[0].ks) << " -> " << fmt(right[1].ks)
           << "; sqrt(n)*D: var ratio " << fmt(bad);
}

// ---------------------------------------------------------------------------

void proposition2(Verdict& v) {
  auto diag = [](double a, double b) { return DensityOperator::diagonal((RealVector(2) << a, b).finished()); };
  const DensityOperator sigma = diag(0.2, 0.8);
  const std::vector<DensityOperator> states{diag(0.4, 0.6), diag(0.7, 0.3), diag(0.9, 0.1)};
  const HypothesisGrid grid({0.0, 0.2, 0.65, 1.5});
  double margin = 1e300;
  for (std::size_t i = 0; i < states.size(); ++i) {
    margin = std::min(margin, umegaki(states[i], sigma).value() - grid.epsilons()[i]);
  }
  v.expect(margin >= 0.1, "separation margin " + fmt(margin));

  HypothesisScenario sc{states, sigma, grid, 0.05, 10000, 2000, 7007};
  sc.threads = 4;
  const ErrorRateReport rep = simulate_error_rates(sc);
  const double bound = 4.0 * 4.0 * std::pow(std::log(rep.b), 2);
  std::ostringstream rates;
  for (const auto& row : rep.rows) {
    const double radius = 0.5 * (row.wilson_high - row.wilson_low);
    v.expect(row.rate <= sc.tau + 3.0 * radius, "hypothesis " + std::to_string(row.hypothesis) + " rate " + fmt(row.rate));
    v.expect(row.v1_squared <= bound, "variance bound violated at hypothesis " + std::to_string(row.hypothesis));
    rates << " " << fmt(row.rate);
  }
  v.expect(std::abs(rep.c - threshold_c(0.05, 2, 0.1)) <= 1e-12, "threshold c");
  v.detail << "margin " << fmt(margin) << ", c " << fmt(rep.c) << ", rates" << rates.str() << ", v1^2 bound "
           << fmt(bound);
}

// ---------------------------------------------------------------------------

void structural_properties(Verdict& v) {
  std::mt19937_64 g(8008);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 200; ++i) {
    const int d = 2 + i % 4;
    // B <= A <= C bounds the trace norm of A
    const HermitianOperator a = qtest::random_hermitian(d, g);
    const HermitianOperator b = a - qtest::random_pd(d, g, 10.0) * 0.5;
    const HermitianOperator c = a + qtest::random_pd(d, g, 10.0) * 0.5;
    v.expect(schatten_norm(a, 1) <= schatten_norm(b, 1) + schatten_norm(c, 1) + 1e-10, "trace-norm sandwich bound");

    // A supported on P: Tr[AB] = Tr[PAPBP]
    const int k = 1 + i % d;
    const Matrix u = qtest::haar_unitary(d, g);
    const Matrix pm = u.leftCols(k) * u.leftCols(k).adjoint();
    const Matrix am = pm * qtest::random_hermitian(d, g).matrix() * pm;
    const Matrix bm = qtest::random_hermitian(d, g).matrix();
    const double lhs = trace_product(am, bm);
    const double rhs = (pm * am * pm * bm * pm).trace().real();
    v.expect(std::abs(lhs - rhs) <= 1e-10, "support trace identity");

    // simplex projection
    RealVector x(d), y(d);
    for (int j = 0; j < d; ++j) {
      x[j] = nd(g);
      y[j] = nd(g);
    }
    const RealVector px = project_to_simplex(x), py = project_to_simplex(y);
    v.expect(std::abs(px.sum() - 1.0) <= 1e-12 && px.minCoeff() >= 0.0, "simplex membership");
    v.expect((project_to_simplex(px) - px).cwiseAbs().maxCoeff() <= 1e-12, "simplex idempotence");
    v.expect((px - py).norm() <= (x - y).norm() + 1e-12, "simplex nonexpansive");

    // density projection
    const HermitianOperator hx = qtest::random_hermitian(d, g), hy = qtest::random_hermitian(d, g);
    const DensityOperator dx = project_to_density(hx), dy = project_to_density(hy);
    v.expect(qtest::max_abs_diff(project_to_density(dx.op()).op(), dx.op()) <= 1e-12, "density idempotence");
    v.expect((dx.matrix() - dy.matrix()).norm() <= (hx.matrix() - hy.matrix()).norm() + 1e-12,
             "density projection nonexpansive");

    // POVM normalization, general rank-one-free POVM built as S^-1/2 G_i S^-1/2
    std::vector<HermitianOperator> gs;
    HermitianOperator total = HermitianOperator::zero(d);
    for (int m = 0; m < 3; ++m) {
      gs.push_back(qtest::random_pd(d, g, 10.0));
      total = total + gs.back();
    }
    const Matrix w = matrix_function(total, ScalarFunction::power(-0.5)).matrix();
    std::vector<HermitianOperator> els;
    for (const auto& gm : gs) els.push_back(HermitianOperator::hermitian_part(w * gm.matrix() * w));
    const Povm povm(els);
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : povm.elements()) sum += e.matrix();
    v.expect((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10, "POVM sums to identity");
    const RealVector probs = povm_apply(povm, qtest::random_density(d, g));
    v.expect(std::abs(probs.sum() - 1.0) <= 1e-10 && probs.minCoeff() >= -1e-12, "POVM outcome distribution");
    const Povm proj = Povm::projective(qtest::random_hermitian(d, g));
    sum.setZero();
    for (const auto& e : proj.elements()) sum += e.matrix();
    v.expect((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10, "projective POVM sums to identity");
  }

  // Pauli orthogonality, every pair for N <= 3
  long long pairs = 0;
  for (int nq = 1; nq <= 3; ++nq) {
    const PauliBasisSet basis = build_pauli_basis(nq);
    const int d = basis.dim();
    v.expect(basis.size() == d * d - 1, "basis size");
    for (int i = 0; i < basis.size(); ++i) {
      v.expect(std::abs(basis.op(i).trace()) <= 1e-12, "Pauli trace");
      for (int j = 0; j < basis.size(); ++j) {
        const double want = i == j ? d : 0.0;
        v.expect(std::abs(trace_product(basis.op(i), basis.op(j)) - want) <= 1e-12, "Pauli orthogonality");
        ++pairs;
      }
    }
  }
  v.detail << "200 random instances, " << pairs << " Pauli pairs";
}

struct Criterion {
  const char* name;
  double budget_seconds;
  void (*run)(Verdict&);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"frechet-correctness", 60, frechet_correctness},
      {"divergence-identities", 60, divergence_identities},
      {"limit-taylor-consistency", 120, taylor_consistency},
      {"commutative-reductions", 60, commutative_reductions},
      {"clt-variance-desk-scale", 600, proposition1},
      {"null-rate-discrimination", 600, null_discrimination},
      {"hypothesis-test-level", 600, proposition2},
      {"structural-properties", 30, structural_properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.expect(secs <= c.budget_seconds, "over time budget");
    if (!v.ok) ++failed;
    std::printf("[%s] %s (%.2fs): %s", v.ok ? "PASS" : "FAIL", c.name, secs, v.detail.str().c_str());
    if (!v.ok) std::printf(" | %d failed checks, first: %s", v.failures, v.first_failure.c_str());
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
