#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "qasym/divergences.hpp"
#include "qasym/errors.hpp"
#include "qasym/frechet.hpp"
#include "qasym/limit_laws.hpp"

using namespace qasym;

namespace {

Matrix cm2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Same instance as tests/oracles/frozen_values.py.
DensityOperator rho0() { return DensityOperator(HermitianOperator(cm2(0.7, {0.1, -0.05}, {0.1, 0.05}, 0.3))); }
DensityOperator sigma0() { return DensityOperator(HermitianOperator(cm2(0.45, {0.05, 0.1}, {0.05, -0.1}, 0.55))); }
LimitDirection l1_0() { return LimitDirection(HermitianOperator(cm2(0.3, {-0.2, 0.1}, {-0.2, -0.1}, -0.3))); }
LimitDirection l2_0() { return LimitDirection(HermitianOperator(cm2(-0.1, {0, 0.25}, {0, -0.25}, 0.1))); }

DensityOperator shifted(const DensityOperator& r, const LimitDirection& l, double t) {
  return DensityOperator(r.op() + l.op() * t);
}

LimitDirection diag_dir(const RealVector& v) {
  RealVector w = v;
  w.array() -= w.mean();
  return LimitDirection(HermitianOperator::diagonal(w));
}

RealVector diag_of(const DensityOperator& r) { return r.matrix().diagonal().real(); }

}  // namespace

TEST_CASE("limit direction and scaling") {
  CHECK_THROWS_AS(LimitDirection(HermitianOperator::identity(2)), ParameterError);
  const auto z = LimitDirection::zero(3);
  CHECK(z.dim() == 3);
  RealVector v(2);
  v << 1.0, -1.0;
  const LimitDirection l(HermitianOperator::diagonal(v));
  CHECK(l.supported_on(DensityOperator::maximally_mixed(2)));
  CHECK_FALSE(l.supported_on(DensityOperator::diagonal((RealVector(2) << 1.0, 0.0).finished())));
  CHECK(ScalingSequence(0.5).at(1e4) == doctest::Approx(100.0));
  CHECK_THROWS_AS(ScalingSequence(0.0), ParameterError);
}

TEST_CASE("frozen oracle values") {
  const auto r = rho0(), s = sigma0();
  const auto a = l1_0(), b = l2_0();
  CHECK(qre_alt_limit(r, s, a, b) == doctest::Approx(0.47630531898563822021).epsilon(1e-11));
  CHECK(qre_null_limit(r, a, b) == doctest::Approx(0.51296326219535748654).epsilon(1e-11));
  CHECK(vn_entropy_limit(r, a) == doctest::Approx(-0.15125660066065673956).epsilon(1e-11));
  CHECK(petz_alt_limit(r, s, 0.5, a, b) == doctest::Approx(0.25267147563719591657).epsilon(1e-11));
  CHECK(petz_alt_limit(r, s, 1.5, a, b) == doctest::Approx(0.64820731179781214776).epsilon(1e-11));
  CHECK(petz_null_limit(r, 0.5, a, b) == doctest::Approx(0.25355809692665987566).epsilon(1e-11));
  CHECK(petz_null_limit(r, 1.5, a, b) == doctest::Approx(0.79662524458869704352).epsilon(1e-11));
  CHECK(sandwiched_alt_limit(r, s, 0.75, a, b) == doctest::Approx(0.36889840564419888274).epsilon(1e-11));
  CHECK(sandwiched_alt_limit(r, s, 2.0, a, b) == doctest::Approx(0.74834274143486338258).epsilon(1e-11));
  CHECK(fidelity_limit(r, s, a, b) == doctest::Approx(-0.22636175874937523102).epsilon(1e-11));
  CHECK(maxdiv_limit(r, s, a, b) == doctest::Approx(0.82134351708174003884).epsilon(1e-11));
  const Matrix x = cm2(0.5, 0.5, 0.5, 0.5);
  const Povm px({HermitianOperator(x), HermitianOperator(Matrix::Identity(2, 2) - x)});
  CHECK(measured_alt_limit(r, s, px, a, b) == doctest::Approx(-0.040958882529202644141).epsilon(1e-11));
}

TEST_CASE("zero directions give zero") {
  const auto r = rho0(), s = sigma0();
  const auto z = LimitDirection::zero(2);
  CHECK(qre_alt_limit(r, s, z, z) == 0.0);
  CHECK(qre_null_limit(r, z, z) == 0.0);
  CHECK(vn_entropy_limit(r, z) == 0.0);
  CHECK(petz_alt_limit(r, s, 0.5, z, z) == 0.0);
  CHECK(sandwiched_alt_limit(r, s, 2.0, z, z) == 0.0);
  CHECK(fidelity_limit(r, s, z, z) == 0.0);
  CHECK(maxdiv_limit(r, s, z, z) == 0.0);
  CHECK(measured_alt_limit(r, s, Povm::computational_basis(2), z, z) == 0.0);
  CHECK(qre_null_limit(r, l1_0(), l1_0()) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(measured_alt_limit(r, s, Povm::trivial(2), l1_0(), l2_0()) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(vn_entropy_limit(DensityOperator::maximally_mixed(2), l1_0()) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("commutative reductions") {
  std::mt19937_64 g(31);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 3;
    const auto r = qtest::random_diagonal_density(d, g), s = qtest::random_diagonal_density(d, g);
    RealVector u(d), v(d);
    for (int i = 0; i < d; ++i) { u[i] = n(g); v[i] = n(g); }
    const auto a = diag_dir(u), b = diag_dir(v);
    const RealVector p = diag_of(r), q = diag_of(s);
    const RealVector la = a.op().matrix().diagonal().real(), lb = b.op().matrix().diagonal().real();

    const double alt = (la.array() * (p.array() / q.array()).log()).sum() - (lb.array() * p.array() / q.array()).sum();
    CHECK(std::abs(qre_alt_limit(r, s, a, b) - alt) < 1e-12);
    CHECK(std::abs(qre_alt_limit_commuting(r, s, a, b) - alt) < 1e-12);

    const double null = 0.5 * ((la - lb).array().square() / p.array()).sum();
    CHECK(std::abs(qre_null_limit(r, a, b) - null) < 1e-12);
    CHECK(std::abs(qre_null_limit_commuting(r, a, b) - null) < 1e-12);

    CHECK(std::abs(vn_entropy_limit(r, a) + (la.array() * p.array().log()).sum()) < 1e-12);

    for (double al : {0.3, 0.5, 1.5, 2.0}) {
      const double tr = (p.array().pow(al) * q.array().pow(1 - al)).sum();
      const double num = al * (la.array() * q.array().pow(1 - al) * p.array().pow(al - 1)).sum() +
                         (1 - al) * (lb.array() * p.array().pow(al) * q.array().pow(-al)).sum();
      const double want = num / ((al - 1) * tr);
      CHECK(std::abs(petz_alt_limit(r, s, al, a, b) - want) < 1e-9);
      CHECK(std::abs(petz_alt_limit_commuting(r, s, al, a, b) - want) < 1e-9);
      // second-order coefficient of the scalar Renyi sum is (alpha/2) sum (l1-l2)^2/p
      CHECK(std::abs(petz_null_limit(r, al, a, b) - al * null) < 1e-9);
      CHECK(std::abs(petz_null_limit_commuting(r, al, a, b) - al * null) < 1e-9);
    }
    for (double al : {0.5, 0.75, 2.0, 3.0}) {
      const double tr = (p.array().pow(al) * q.array().pow(1 - al)).sum();
      const double num = al * (la.array() * q.array().pow(1 - al) * p.array().pow(al - 1)).sum() +
                         (1 - al) * (lb.array() * p.array().pow(al) * q.array().pow(-al)).sum();
      CHECK(std::abs(sandwiched_alt_limit(r, s, al, a, b) - num / ((al - 1) * tr)) < 1e-9);
      if (al <= 2.0) {
        CHECK(std::abs(sandwiched_alt_limit(r, s, al, a, b) - petz_alt_limit_commuting(r, s, al, a, b)) < 1e-9);
      }
    }
    CHECK(std::abs(measured_alt_limit(r, s, Povm::computational_basis(d), a, b) - alt) < 1e-12);

    // commuting shift C leaves the null limit unchanged
    RealVector c(d);
    for (int i = 0; i < d; ++i) c[i] = n(g);
    const auto cc = diag_dir(c);
    const LimitDirection a2(a.op() + cc.op()), b2(b.op() + cc.op());
    CHECK(std::abs(qre_null_limit(r, a2, b2) - qre_null_limit(r, a, b)) < 1e-12);
  }
}

TEST_CASE("alternative limits are linear") {
  std::mt19937_64 g(33);
  for (int t = 0; t < 10; ++t) {
    const auto r = qtest::random_density(3, g), s = qtest::random_density(3, g);
    const auto a1 = qtest::random_direction(3, g), a2 = qtest::random_direction(3, g);
    const auto b1 = qtest::random_direction(3, g), b2 = qtest::random_direction(3, g);
    const LimitDirection la(a1 * 0.4 + a2 * -1.1), lb(b1 * 0.4 + b2 * -1.1);
    auto lin = [&](auto f) {
      const double lhs = f(la, lb);
      const double rhs = 0.4 * f(LimitDirection(a1), LimitDirection(b1)) - 1.1 * f(LimitDirection(a2), LimitDirection(b2));
      CHECK(std::abs(lhs - rhs) < 1e-10);
    };
    lin([&](const LimitDirection& x, const LimitDirection& y) { return qre_alt_limit(r, s, x, y); });
    lin([&](const LimitDirection& x, const LimitDirection& y) { return petz_alt_limit(r, s, 1.5, x, y); });
    lin([&](const LimitDirection& x, const LimitDirection& y) { return sandwiched_alt_limit(r, s, 0.75, x, y); });
    lin([&](const LimitDirection& x, const LimitDirection& y) { return fidelity_limit(r, s, x, y); });
  }
}

TEST_CASE("consistency checks") {
  std::mt19937_64 g(35);
  for (int t = 0; t < 10; ++t) {
    const auto r = qtest::random_density(2, g, 0.1), s = qtest::random_density(2, g, 0.1);
    const LimitDirection a(qtest::random_direction(2, g)), b(qtest::random_direction(2, g));
    // alt formula at rho = sigma
    const double same = -trace_product(r.op(), frechet1(r, ScalarFunction::log(), b.op()));
    CHECK(std::abs(qre_alt_limit(r, r, a, b) - same) < 1e-12);
    CHECK(std::abs(sandwiched_alt_limit(r, r, 2.0, a, b)) < 1e-12);
    CHECK(std::abs(sandwiched_alt_limit(r, r, 0.6, a, b)) < 1e-12);
    // continuity in alpha
    const double q = qre_alt_limit(r, s, a, b);
    CHECK(std::abs(petz_alt_limit(r, s, 1.0 + 1e-4, a, b) - q) <= 1e-3);
    CHECK(std::abs(petz_alt_limit(r, s, 1.0 - 1e-4, a, b) - q) <= 1e-3);
    const double mid = 0.5 * (petz_alt_limit(r, s, 1.0 + 1e-4, a, b) + petz_alt_limit(r, s, 1.0 - 1e-4, a, b));
    CHECK(std::abs(mid - q) <= 1e-6);
    // F = exp(-D_1/2) chain rule
    const double f = fidelity(r, s);
    CHECK(std::abs(fidelity_limit(r, s, a, b) + f * sandwiched_alt_limit(r, s, 0.5, a, b)) < 1e-9);
    // null limit is a nonnegative quadratic form
    CHECK(qre_null_limit(r, a, b) >= -1e-8);
    // extrapolation of n D(rho + L1/sqrt n || rho + L2/sqrt n)
    const LimitDirection a3(a.op() * 0.05), b3(b.op() * 0.05);
    const double want = qre_null_limit(r, a3, b3);
    for (double nn : {1e4, 1e6}) {
      const double h = 1.0 / std::sqrt(nn);
      const double got = nn * umegaki(shifted(r, a3, h), shifted(r, b3, h)).value();
      CHECK(std::abs(got - want) <= 10.0 * std::abs(want) * h);
    }
    const double pw = petz_null_limit(r, 1.5, a3, b3);
    const double pg = 1e6 * petz_renyi(shifted(r, a3, 1e-3), shifted(r, b3, 1e-3), 1.5).value();
    CHECK(std::abs(pg - pw) <= 10.0 * std::abs(pw) * 1e-3);
  }

  // diagonal pair with a unique top ratio
  const auto r = DensityOperator::diagonal((RealVector(2) << 0.7, 0.3).finished());
  const auto s = DensityOperator::diagonal((RealVector(2) << 0.4, 0.6).finished());
  const LimitDirection a(HermitianOperator::diagonal((RealVector(2) << 0.2, -0.2).finished()));
  const LimitDirection b(HermitianOperator::diagonal((RealVector(2) << -0.1, 0.1).finished()));
  const double t = 1e-5;
  const double fd = (max_divergence(shifted(r, a, t), shifted(s, b, t)).value() -
                     max_divergence(shifted(r, a, -t), shifted(s, b, -t)).value()) / (2 * t);
  CHECK(std::abs(maxdiv_limit(r, s, a, b) - fd) < 1e-5);
  CHECK(maxdiv_limit(r, s, a, b) == doctest::Approx(0.2 / 0.7 + 0.1 / 0.4));

  // degenerate top eigenvalue
  const auto mm = DensityOperator::maximally_mixed(2);
  CHECK_THROWS_AS(maxdiv_limit(mm, mm, a, b), DomainError);
}

TEST_CASE("support handling") {
  const auto r = DensityOperator::diagonal((RealVector(3) << 0.6, 0.4, 0.0).finished());
  const auto s = DensityOperator::diagonal((RealVector(3) << 0.5, 0.3, 0.2).finished());
  const LimitDirection inside(HermitianOperator::diagonal((RealVector(3) << 0.1, -0.1, 0.0).finished()));
  Matrix off = Matrix::Zero(3, 3);
  off(0, 2) = off(2, 0) = 0.1;
  const LimitDirection outside{HermitianOperator(off)};
  CHECK_NOTHROW(qre_null_limit(r, inside, LimitDirection::zero(3)));
  CHECK_THROWS_AS(qre_null_limit(r, outside, LimitDirection::zero(3)), SupportError);
  // rank-deficient rho is fine in the alternative case when rho << sigma
  CHECK(std::isfinite(qre_alt_limit(r, s, inside, outside)));
  CHECK_THROWS_AS(qre_alt_limit(s, r, inside, inside), SupportError);
  CHECK_THROWS_AS(petz_alt_limit(r, s, 2.5, inside, inside), ParameterError);
  CHECK_THROWS_AS(sandwiched_alt_limit(r, s, 0.25, inside, inside), ParameterError);
}
