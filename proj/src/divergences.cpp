#include "qasym/divergences.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "qasym/errors.hpp"

namespace qasym {

namespace {

double support_threshold(const SpectralDecomposition& s) {
  return kSupportRelTol * std::max(s.eigenvalues.maxCoeff(), 0.0);
}

// x^p on the support, 0 on the (numerical) kernel.
HermitianOperator psd_power(const SpectralDecomposition& s, double p) {
  const double thr = support_threshold(s);
  return apply_scalar_function(s, [=](double x) { return x > thr ? std::pow(x, p) : 0.0; });
}

HermitianOperator psd_log(const SpectralDecomposition& s) {
  const double thr = support_threshold(s);
  return apply_scalar_function(s, [=](double x) { return x > thr ? std::log(x) : 0.0; });
}

double entropy_term_sum(const RealVector& p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) acc += p[i] * std::log(p[i]);
  }
  return acc;
}

void require_same_dim(const HermitianOperator& a, const HermitianOperator& b, const char* who) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << who << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw ParameterError(os.str());
  }
}

void validate_distribution(const RealVector& p, double tol, const char* name) {
  if (p.size() == 0) throw ParameterError(std::string(name) + " is empty");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < -tol) {
      std::ostringstream os;
      os << name << "[" << i << "] = " << p[i] << " is not a probability";
      throw ParameterError(os.str());
    }
  }
  if (std::abs(p.sum() - 1.0) > std::max(tol, 1e-12)) {
    std::ostringstream os;
    os << name << " sums to " << p.sum() << ", expected 1";
    throw ParameterError(os.str());
  }
}

}  // namespace

Povm::Povm(std::vector<HermitianOperator> elements, double tol) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ParameterError("POVM needs at least one element");
  const int d = elements_.front().dim();
  Matrix total = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].dim() != d) throw ParameterError("POVM elements have different dimensions");
    const double lo = min_eigenvalue(elements_[i]);
    if (lo < -tol) {
      std::ostringstream os;
      os << "POVM element " << i << " is not PSD (min eigenvalue " << lo << ")";
      throw ParameterError(os.str());
    }
    total += elements_[i].matrix();
  }
  const double dev = max_abs(total - Matrix::Identity(d, d));
  if (dev > tol) {
    std::ostringstream os;
    os << "POVM elements do not sum to the identity (max deviation " << dev << ")";
    throw ParameterError(os.str());
  }
}

Povm Povm::trivial(int dim) { return Povm({HermitianOperator::identity(dim)}); }

Povm Povm::computational_basis(int dim) {
  if (dim < 1) throw ParameterError("dimension must be >= 1");
  std::vector<HermitianOperator> out;
  for (int i = 0; i < dim; ++i) {
    RealVector e = RealVector::Zero(dim);
    e[i] = 1.0;
    out.push_back(HermitianOperator::diagonal(e));
  }
  return Povm(std::move(out));
}

Povm Povm::projective(const HermitianOperator& a) {
  const SpectralDecomposition s = eig_hermitian(a);
  std::vector<HermitianOperator> out;
  for (int i = 0; i < s.dim(); ++i) {
    const ComplexVector v = s.eigenvectors.col(i);
    out.push_back(HermitianOperator::hermitian_part(v * v.adjoint()));
  }
  return Povm(std::move(out));
}

RealVector povm_apply(const Povm& m, const HermitianOperator& a) {
  if (m.dim() != a.dim()) throw ParameterError("povm_apply: dimension mismatch");
  RealVector out(m.outcome_count());
  for (int i = 0; i < m.outcome_count(); ++i) out[i] = trace_product(m.elements()[i], a);
  return out;
}

DivergenceValue DivergenceValue::finite(double v, std::string diagnostics) {
  if (!std::isfinite(v)) throw NumericError("divergence evaluated to a non-finite number");
  return DivergenceValue(true, v, std::move(diagnostics));
}

DivergenceValue DivergenceValue::infinite(std::string diagnostics) {
  return DivergenceValue(false, 0.0, std::move(diagnostics));
}

double DivergenceValue::value() const {
  if (!support_ok_) throw DomainError("divergence is +inf: " + diagnostics_);
  return value_;
}

std::string DivergenceValue::to_string() const {
  if (!support_ok_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

DivergenceValue umegaki(const DensityOperator& rho, const DensityOperator& sigma, double tol) {
  require_same_dim(rho, sigma, "umegaki");
  if (!support_contained(rho, sigma, tol)) return DivergenceValue::infinite("supp(rho) not in supp(sigma)");
  const SpectralDecomposition er = eig_hermitian(rho);
  const SpectralDecomposition es = eig_hermitian(sigma);
  const double thr = support_threshold(er);
  RealVector p = er.eigenvalues;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= thr) p[i] = 0.0;
  }
  const double v = entropy_term_sum(p) - trace_product(rho.op(), psd_log(es));
  return DivergenceValue::finite(v);
}

double von_neumann_entropy(const DensityOperator& rho) {
  const SpectralDecomposition er = eig_hermitian(rho);
  const double thr = support_threshold(er);
  RealVector p = er.eigenvalues;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= thr) p[i] = 0.0;
  }
  return -entropy_term_sum(p);
}

DivergenceValue classical_kl(const RealVector& p, const RealVector& q, double tol) {
  if (p.size() != q.size()) throw ParameterError("classical_kl: length mismatch");
  validate_distribution(p, tol, "P");
  validate_distribution(q, tol, "Q");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= tol) continue;
    if (q[i] <= tol) {
      std::ostringstream os;
      os << "P(" << i << ") > 0 but Q(" << i << ") = 0";
      return DivergenceValue::infinite(os.str());
    }
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return DivergenceValue::finite(acc);
}

DivergenceValue classical_renyi(const RealVector& p, const RealVector& q, double alpha, double tol) {
  if (p.size() != q.size()) throw ParameterError("classical_renyi: length mismatch");
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw ParameterError("classical_renyi: alpha must be positive and != 1");
  }
  validate_distribution(p, tol, "P");
  validate_distribution(q, tol, "Q");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= tol) continue;
    if (q[i] <= tol) {
      if (alpha > 1.0) return DivergenceValue::infinite("P not absolutely continuous w.r.t. Q");
      continue;
    }
    acc += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  }
  if (!(acc > 0.0)) return DivergenceValue::infinite("P and Q are orthogonal");
  return DivergenceValue::finite(std::log(acc) / (alpha - 1.0));
}

DivergenceValue petz_renyi(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                           double tol) {
  if (!((alpha > 0.0 && alpha < 1.0) || (alpha > 1.0 && alpha <= 2.0))) {
    std::ostringstream os;
    os << "petz_renyi: alpha must lie in (0,1) u (1,2], got " << alpha;
    throw ParameterError(os.str());
  }
  require_same_dim(rho, sigma, "petz_renyi");
  if (alpha > 1.0 && !support_contained(rho, sigma, tol)) {
    return DivergenceValue::infinite("supp(rho) not in supp(sigma)");
  }
  const double q = trace_product(psd_power(eig_hermitian(rho), alpha),
                                 psd_power(eig_hermitian(sigma), 1.0 - alpha));
  if (!(q > tol)) return DivergenceValue::infinite("rho and sigma are orthogonal");
  return DivergenceValue::finite(std::log(q) / (alpha - 1.0));
}

HermitianOperator sandwiched_core(const DensityOperator& rho, const DensityOperator& sigma,
                                  double alpha) {
  require_same_dim(rho, sigma, "sandwiched_core");
  const HermitianOperator r = psd_power(eig_hermitian(rho), 0.5);
  const HermitianOperator s = psd_power(eig_hermitian(sigma), (1.0 - alpha) / alpha);
  return HermitianOperator::hermitian_part(r.matrix() * s.matrix() * r.matrix());
}

namespace {

void check_sandwiched_alpha(double alpha, const char* who) {
  if (!((alpha >= 0.5 && alpha < 1.0) || (alpha > 1.0 && std::isfinite(alpha)))) {
    std::ostringstream os;
    os << who << ": alpha must lie in [1/2,1) u (1,inf), got " << alpha;
    throw ParameterError(os.str());
  }
}

double trace_power(const SpectralDecomposition& s, double p) {
  const double thr = support_threshold(s);
  double acc = 0.0;
  for (int i = 0; i < s.dim(); ++i) {
    if (s.eigenvalues[i] > thr) acc += std::pow(s.eigenvalues[i], p);
  }
  return acc;
}

}  // namespace

DivergenceValue sandwiched_renyi(const DensityOperator& rho, const DensityOperator& sigma,
                                 double alpha, double tol) {
  check_sandwiched_alpha(alpha, "sandwiched_renyi");
  require_same_dim(rho, sigma, "sandwiched_renyi");
  if (alpha > 1.0 && !support_contained(rho, sigma, tol)) {
    return DivergenceValue::infinite("supp(rho) not in supp(sigma)");
  }
  const double q = trace_power(eig_hermitian(sandwiched_core(rho, sigma, alpha)), alpha);
  if (!(q > 0.0)) return DivergenceValue::infinite("rho and sigma are orthogonal");
  return DivergenceValue::finite(std::log(q) / (alpha - 1.0));
}

HermitianOperator sandwiched_dual_optimizer(const DensityOperator& rho, const DensityOperator& sigma,
                                            double alpha) {
  check_sandwiched_alpha(alpha, "sandwiched_dual_optimizer");
  if (alpha > 1.0 && !support_contained(rho, sigma)) {
    throw SupportError("sandwiched_dual_optimizer: supp(rho) not in supp(sigma)");
  }
  const SpectralDecomposition ex = eig_hermitian(sandwiched_core(rho, sigma, alpha));
  const double q = trace_power(ex, alpha);
  if (!(q > 0.0)) throw SupportError("sandwiched_dual_optimizer: rho and sigma are orthogonal");
  const double norm = std::pow(q, 1.0 / alpha);
  return psd_power(ex, alpha - 1.0) * (1.0 / std::pow(norm, alpha - 1.0));
}

double sandwiched_variational_objective(const DensityOperator& rho, const DensityOperator& sigma,
                                        double alpha, const HermitianOperator& eta) {
  check_sandwiched_alpha(alpha, "sandwiched_variational_objective");
  const double t = trace_product(sandwiched_core(rho, sigma, alpha), eta);
  if (!(t > 0.0)) throw DomainError("variational objective: Tr[X eta] is not positive");
  return alpha / (alpha - 1.0) * std::log(t);
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho, sigma, "fidelity");
  const Matrix prod = psd_power(eig_hermitian(rho), 0.5).matrix() *
                      psd_power(eig_hermitian(sigma), 0.5).matrix();
  const double s = Eigen::JacobiSVD<Matrix>(prod).singularValues().sum();
  return std::min(1.0, s * s);
}

namespace {

// Columns spanning supp(a).
Matrix support_basis(const SpectralDecomposition& s) {
  const double thr = support_threshold(s);
  int r = 0;
  for (int i = 0; i < s.dim(); ++i) r += s.eigenvalues[i] > thr ? 1 : 0;
  Matrix v(s.dim(), r);
  int c = 0;
  for (int i = 0; i < s.dim(); ++i) {
    if (s.eigenvalues[i] > thr) v.col(c++) = s.eigenvectors.col(i);
  }
  return v;
}

}  // namespace

DivergenceValue max_divergence(const DensityOperator& rho, const DensityOperator& sigma, double tol) {
  require_same_dim(rho, sigma, "max_divergence");
  if (!support_contained(rho, sigma, tol)) return DivergenceValue::infinite("supp(rho) not in supp(sigma)");
  const SpectralDecomposition es = eig_hermitian(sigma);
  const double thr = support_threshold(es);
  RealVector inv_sqrt(es.dim());
  for (int i = 0; i < es.dim(); ++i) {
    inv_sqrt[i] = es.eigenvalues[i] > thr ? 1.0 / std::sqrt(es.eigenvalues[i]) : 0.0;
  }
  const Matrix w = es.eigenvectors * inv_sqrt.cast<Complex>().asDiagonal();
  const HermitianOperator m = HermitianOperator::hermitian_part(w.adjoint() * rho.matrix() * w);
  return DivergenceValue::finite(std::log(max_eigenvalue(m)));
}

DivergenceValue max_divergence_bisection(const DensityOperator& rho, const DensityOperator& sigma,
                                         double tol, double lambda_tol) {
  require_same_dim(rho, sigma, "max_divergence_bisection");
  if (!support_contained(rho, sigma, tol)) return DivergenceValue::infinite("supp(rho) not in supp(sigma)");
  const Matrix v = support_basis(eig_hermitian(sigma));
  const HermitianOperator r = HermitianOperator::hermitian_part(v.adjoint() * rho.matrix() * v);
  const HermitianOperator s = HermitianOperator::hermitian_part(v.adjoint() * sigma.matrix() * v);
  auto dominated = [&](double lambda) { return loewner_leq(r, s * std::exp(lambda), 0.0); };
  double lo = -1.0;
  double hi = 1.0;
  while (!dominated(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 700.0) throw NumericError("max_divergence_bisection: no finite bracket");
  }
  while (hi - lo > lambda_tol) {
    const double mid = 0.5 * (lo + hi);
    if (dominated(mid)) hi = mid;
    else lo = mid;
  }
  return DivergenceValue::finite(hi);
}

MeasuredResult measured_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma,
                                         const std::vector<Povm>& family, double tol) {
  if (family.empty()) throw ParameterError("measured_relative_entropy: empty POVM family");
  require_same_dim(rho, sigma, "measured_relative_entropy");
  std::vector<DivergenceValue> values;
  values.reserve(family.size());
  int best = 0;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (family[k].dim() != rho.dim()) throw ParameterError("POVM dimension does not match the states");
    values.push_back(classical_kl(povm_apply(family[k], rho), povm_apply(family[k], sigma), tol));
    const DivergenceValue& cur = values.back();
    const DivergenceValue& top = values[best];
    if (k == 0) continue;
    if (top.is_infinite()) continue;
    if (cur.is_infinite() || cur.value() > top.value()) best = static_cast<int>(k);
  }
  std::vector<int> near;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const bool close = values[best].is_infinite()
                           ? values[k].is_infinite()
                           : (!values[k].is_infinite() && values[k].value() >= values[best].value() - 1e-9);
    if (close) near.push_back(static_cast<int>(k));
  }
  return MeasuredResult{values[best], best, std::move(near)};
}

}  // namespace qasym
