#include "qasym/frechet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qasym/errors.hpp"

namespace qasym {

namespace {

bool coalesced(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max({std::abs(x), std::abs(y), 1.0});
}

std::vector<Matrix> powers_of(const Matrix& a, int up_to) {
  std::vector<Matrix> out;
  out.reserve(up_to + 1);
  out.push_back(Matrix::Identity(a.rows(), a.cols()));
  for (int i = 1; i <= up_to; ++i) out.push_back(out.back() * a);
  return out;
}

Matrix exact_frechet1(const Matrix& a, int k, const Matrix& h) {
  if (k == -1) {
    const Matrix inv = a.partialPivLu().inverse();
    return -inv * h * inv;
  }
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  if (k <= 0) return out;
  const auto p = powers_of(a, k - 1);
  for (int i = 0; i < k; ++i) out += p[i] * h * p[k - 1 - i];
  return out;
}

Matrix exact_frechet2(const Matrix& a, int k, const Matrix& h1, const Matrix& h2) {
  if (k == -1) {
    const Matrix inv = a.partialPivLu().inverse();
    return inv * h1 * inv * h2 * inv + inv * h2 * inv * h1 * inv;
  }
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  if (k <= 1) return out;
  const auto p = powers_of(a, k - 2);
  for (int i = 0; i <= k - 2; ++i) {
    for (int j = 0; i + j <= k - 2; ++j) {
      const int l = k - 2 - i - j;
      out += p[i] * (h1 * p[j] * h2 + h2 * p[j] * h1) * p[l];
    }
  }
  return out;
}

// R = (tau I + A)^{-1} = r * exp(log_scale); for tau >= 1 r = (I + A/tau)^{-1}
// so the products below stay in range for tau up to e^600.
struct ScaledResolvent {
  Matrix r;
  double log_scale;
};

ScaledResolvent scaled_resolvent(const Matrix& a, double tau) {
  const Eigen::Index d = a.rows();
  const Matrix eye = Matrix::Identity(d, d);
  Matrix m;
  double log_scale = 0.0;
  if (tau >= 1.0) {
    m = eye + a / tau;
    log_scale = -std::log(tau);
  } else {
    m = tau * eye + a;
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericError("resolvent factorization failed");
  return {llt.solve(eye), log_scale};
}

void require_positive_definite(const HermitianOperator& a, const char* who) {
  Eigen::LLT<Matrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw DomainError(std::string(who) + ": base point must be strictly positive definite");
  }
}

using Integrand = std::function<Matrix(double tau, double log_w, const ScaledResolvent& res)>;

Matrix integrate(const HermitianOperator& a, const QuadratureRule& rule, const Integrand& term) {
  Matrix sum = Matrix::Zero(a.dim(), a.dim());
  const auto& nodes = rule.nodes();
  const auto& weights = rule.weights();
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    sum += term(nodes[m], std::log(weights[m]), scaled_resolvent(a.matrix(), nodes[m]));
  }
  return sum;
}

QuadratureEstimate estimate(const HermitianOperator& a, const QuadratureRule& rule,
                            const Integrand& term) {
  const Matrix fine = integrate(a, rule, term);
  double err = 0.0;
  if (rule.family() != QuadratureRule::Family::Custom) {
    err = max_abs(fine - integrate(a, rule.coarser(), term));
  }
  return {HermitianOperator::hermitian_part(fine), err};
}

void check_dims(const HermitianOperator& a, const HermitianOperator& h, const char* who) {
  if (a.dim() != h.dim()) {
    std::ostringstream os;
    os << who << ": dimension mismatch (" << a.dim() << " vs " << h.dim() << ")";
    throw ParameterError(os.str());
  }
}

}  // namespace

ScalarFunction ScalarFunction::log() { return ScalarFunction(true, 0.0); }

ScalarFunction ScalarFunction::power(double exponent) {
  if (!std::isfinite(exponent)) throw ParameterError("power exponent must be finite");
  return ScalarFunction(false, exponent);
}

bool ScalarFunction::is_integer_power() const {
  return !is_log_ && exponent_ == std::round(exponent_);
}

bool ScalarFunction::has_exact_derivatives() const {
  return is_integer_power() && exponent_ >= -1.0 && exponent_ <= 64.0;
}

bool ScalarFunction::in_domain(double x) const {
  if (!std::isfinite(x)) return false;
  if (is_log_) return x > 0.0;
  if (is_integer_power()) return exponent_ >= 0.0 || x != 0.0;
  return x > 0.0;
}

double ScalarFunction::operator()(double x) const {
  return is_log_ ? std::log(x) : std::pow(x, exponent_);
}

double ScalarFunction::derivative(double x) const {
  if (is_log_) return 1.0 / x;
  if (exponent_ == 0.0) return 0.0;
  if (exponent_ == 1.0) return 1.0;
  return exponent_ * std::pow(x, exponent_ - 1.0);
}

double ScalarFunction::second_derivative(double x) const {
  if (is_log_) return -1.0 / (x * x);
  if (exponent_ == 0.0 || exponent_ == 1.0) return 0.0;
  if (exponent_ == 2.0) return 2.0;
  return exponent_ * (exponent_ - 1.0) * std::pow(x, exponent_ - 2.0);
}

std::string ScalarFunction::name() const {
  if (is_log_) return "log";
  std::ostringstream os;
  os << "power(" << exponent_ << ")";
  return os.str();
}

double ScalarFunction::divided1(double x, double y, double coalesce_tol) const {
  if (coalesced(x, y, coalesce_tol)) return derivative(0.5 * (x + y));
  if (x > 0.0 && y > 0.0) {
    const double delta = (x - y) / y;
    if (std::abs(delta) < 0.5) {
      if (is_log_) return std::log1p(delta) / (x - y);
      return std::pow(y, exponent_ - 1.0) * std::expm1(exponent_ * std::log1p(delta)) / delta;
    }
  }
  if (is_integer_power() && exponent_ >= 0.0 && exponent_ <= 64.0) {
    const int k = static_cast<int>(exponent_);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += std::pow(x, i) * std::pow(y, k - 1 - i);
    return sum;
  }
  if (is_integer_power() && exponent_ == -1.0) return -1.0 / (x * y);
  return ((*this)(x) - (*this)(y)) / (x - y);
}

double ScalarFunction::divided2(double x, double y, double z, double coalesce_tol) const {
  std::array<double, 3> v{x, y, z};
  std::sort(v.begin(), v.end());
  const auto [p, q, r] = v;
  if (coalesced(p, r, coalesce_tol)) return 0.5 * second_derivative((p + q + r) / 3.0);
  if (coalesced(p, q, coalesce_tol)) {
    const double m = 0.5 * (p + q);
    return (divided1(r, m, coalesce_tol) - derivative(m)) / (r - m);
  }
  if (coalesced(q, r, coalesce_tol)) {
    const double m = 0.5 * (q + r);
    return (derivative(m) - divided1(m, p, coalesce_tol)) / (m - p);
  }
  return (divided1(q, r, coalesce_tol) - divided1(p, q, coalesce_tol)) / (r - p);
}

DividedDifferenceTable build_divided_differences(const HermitianOperator& a, ScalarFunction fn,
                                                 double coalesce_tol) {
  SpectralDecomposition eig = eig_hermitian(a);
  const int d = eig.dim();
  for (int i = 0; i < d; ++i) {
    if (!fn.in_domain(eig.eigenvalues[i])) {
      std::ostringstream os;
      os << "eigenvalue " << eig.eigenvalues[i] << " is outside the domain of " << fn.name();
      throw DomainError(os.str());
    }
  }
  const RealVector& lam = eig.eigenvalues;
  Eigen::MatrixXd first(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) first(i, j) = first(j, i) = fn.divided1(lam[i], lam[j], coalesce_tol);
  }
  std::vector<double> second(static_cast<std::size_t>(d) * d * d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) {
        second[(static_cast<std::size_t>(i) * d + k) * d + j] =
            fn.divided2(lam[i], lam[k], lam[j], coalesce_tol);
      }
    }
  }
  return DividedDifferenceTable{fn, a, std::move(eig), std::move(first), std::move(second)};
}

HermitianOperator frechet1(const DividedDifferenceTable& table, const HermitianOperator& h) {
  check_dims(table.base, h, "frechet1");
  if (table.fn.has_exact_derivatives()) {
    return HermitianOperator::hermitian_part(
        exact_frechet1(table.base.matrix(), static_cast<int>(table.fn.exponent()), h.matrix()));
  }
  const Matrix& u = table.eigen.eigenvectors;
  const Matrix hh = u.adjoint() * h.matrix() * u;
  const Matrix weighted = table.first.cast<Complex>().cwiseProduct(hh);
  return HermitianOperator::hermitian_part(u * weighted * u.adjoint());
}

HermitianOperator frechet2(const DividedDifferenceTable& table, const HermitianOperator& h1,
                           const HermitianOperator& h2) {
  check_dims(table.base, h1, "frechet2");
  check_dims(table.base, h2, "frechet2");
  if (table.fn.has_exact_derivatives()) {
    return HermitianOperator::hermitian_part(exact_frechet2(
        table.base.matrix(), static_cast<int>(table.fn.exponent()), h1.matrix(), h2.matrix()));
  }
  const int d = table.dim();
  const Matrix& u = table.eigen.eigenvectors;
  const Matrix a = u.adjoint() * h1.matrix() * u;
  const Matrix b = u.adjoint() * h2.matrix() * u;
  Matrix out = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (int k = 0; k < d; ++k) {
        acc += table.second_at(i, k, j) * (a(i, k) * b(k, j) + b(i, k) * a(k, j));
      }
      out(i, j) = acc;
    }
  }
  return HermitianOperator::hermitian_part(u * out * u.adjoint());
}

HermitianOperator frechet1(const HermitianOperator& a, ScalarFunction fn, const HermitianOperator& h) {
  return frechet1(build_divided_differences(a, fn), h);
}

HermitianOperator frechet2(const HermitianOperator& a, ScalarFunction fn, const HermitianOperator& h1,
                           const HermitianOperator& h2) {
  return frechet2(build_divided_differences(a, fn), h1, h2);
}

HermitianOperator matrix_function(const HermitianOperator& a, ScalarFunction fn) {
  const SpectralDecomposition s = eig_hermitian(a);
  for (int i = 0; i < s.dim(); ++i) {
    if (!fn.in_domain(s.eigenvalues[i])) {
      std::ostringstream os;
      os << "eigenvalue " << s.eigenvalues[i] << " is outside the domain of " << fn.name();
      throw DomainError(os.str());
    }
  }
  return apply_scalar_function(s, [&](double x) { return fn(x); });
}

QuadratureEstimate frechet1_log_quadrature(const HermitianOperator& a, const HermitianOperator& h,
                                           const QuadratureRule& rule) {
  check_dims(a, h, "frechet1_log_quadrature");
  require_positive_definite(a, "frechet1_log_quadrature");
  const Matrix& hm = h.matrix();
  return estimate(a, rule, [&](double, double log_w, const ScaledResolvent& res) -> Matrix {
    return std::exp(log_w + 2.0 * res.log_scale) * (res.r * hm * res.r);
  });
}

QuadratureEstimate frechet2_log_quadrature(const HermitianOperator& a, const HermitianOperator& h1,
                                           const HermitianOperator& h2, const QuadratureRule& rule) {
  check_dims(a, h1, "frechet2_log_quadrature");
  check_dims(a, h2, "frechet2_log_quadrature");
  require_positive_definite(a, "frechet2_log_quadrature");
  const Matrix& x = h1.matrix();
  const Matrix& y = h2.matrix();
  return estimate(a, rule, [&](double, double log_w, const ScaledResolvent& res) -> Matrix {
    const Matrix& r = res.r;
    return -std::exp(log_w + 3.0 * res.log_scale) * (r * x * r * y * r + r * y * r * x * r);
  });
}

QuadratureEstimate frechet_power_quadrature(const HermitianOperator& a, const HermitianOperator& h,
                                            double alpha, int order,
                                            const std::optional<HermitianOperator>& h2,
                                            const QuadratureRule& rule) {
  const bool supported = (alpha > -1.0 && alpha < 0.0) || (alpha > 0.0 && alpha < 1.0) ||
                         (alpha > 1.0 && alpha < 2.0);
  if (!supported) {
    std::ostringstream os;
    os << "power quadrature supports alpha in (-1,0) u (0,1) u (1,2), got " << alpha;
    throw ParameterError(os.str());
  }
  if (order != 1 && order != 2) throw ParameterError("derivative order must be 1 or 2");
  if ((order == 2) != h2.has_value()) {
    throw ParameterError("second direction must be supplied exactly when order == 2");
  }
  check_dims(a, h, "frechet_power_quadrature");
  if (h2) check_dims(a, *h2, "frechet_power_quadrature");
  require_positive_definite(a, "frechet_power_quadrature");

  const Matrix& x = h.matrix();
  const Matrix y = h2 ? h2->matrix() : Matrix();
  const Matrix& am = a.matrix();
  auto sandwich3 = [&](const Matrix& r) -> Matrix { return r * x * r * y * r + r * y * r * x * r; };

  if (alpha > 0.0 && alpha < 1.0) {
    // A^a = c int tau^a (1/tau - R) dtau, c = sin(pi a)/pi
    const double c = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
    return estimate(a, rule, [&](double tau, double log_w, const ScaledResolvent& res) -> Matrix {
      const double lt = std::log(tau);
      if (order == 1) return c * std::exp(log_w + alpha * lt + 2.0 * res.log_scale) * (res.r * x * res.r);
      return -c * std::exp(log_w + alpha * lt + 3.0 * res.log_scale) * sandwich3(res.r);
    });
  }
  if (alpha < 0.0) {
    // A^{-b} = c int tau^{-b} R dtau, b = -a
    const double b = -alpha;
    const double c = std::sin(std::numbers::pi * b) / std::numbers::pi;
    return estimate(a, rule, [&](double tau, double log_w, const ScaledResolvent& res) -> Matrix {
      const double lt = std::log(tau);
      if (order == 1) return -c * std::exp(log_w - b * lt + 2.0 * res.log_scale) * (res.r * x * res.r);
      return c * std::exp(log_w - b * lt + 3.0 * res.log_scale) * sandwich3(res.r);
    });
  }
  // alpha in (1,2): A^a = c int tau^{a-2} A + tau^a R - tau^{a-1} I dtau, c = sin(pi (a-1))/pi.
  // First derivative integrand tau^{a-2} H - tau^a R H R rewritten as
  // tau^{a-2} (A R H + H R A - A R H R A) to avoid cancellation at large tau.
  const double c = std::sin(std::numbers::pi * (alpha - 1.0)) / std::numbers::pi;
  return estimate(a, rule, [&](double tau, double log_w, const ScaledResolvent& res) -> Matrix {
    const double lt = std::log(tau);
    const Matrix& r = res.r;
    if (order == 1) {
      const Matrix arh = am * r * x;
      const Matrix one = arh + arh.adjoint();
      const Matrix two = am * r * x * r * am;
      return c * (std::exp(log_w + (alpha - 2.0) * lt + res.log_scale) * one -
                  std::exp(log_w + (alpha - 2.0) * lt + 2.0 * res.log_scale) * two);
    }
    return c * std::exp(log_w + alpha * lt + 3.0 * res.log_scale) * sandwich3(r);
  });
}

double finite_difference_check(ScalarFunction fn, const HermitianOperator& a,
                               const HermitianOperator& h, double h_step) {
  check_dims(a, h, "finite_difference_check");
  if (!(h_step > 0.0)) throw ParameterError("finite-difference step must be positive");
  const HermitianOperator plus = matrix_function(a + h * h_step, fn);
  const HermitianOperator minus = matrix_function(a - h * h_step, fn);
  const HermitianOperator central = (plus - minus) * (0.5 / h_step);
  return schatten_norm(central - frechet1(a, fn, h), 1.0);
}

}  // namespace qasym
