#include "qasym/limit_laws.hpp"

#include <cmath>
#include <sstream>

#include "qasym/errors.hpp"
#include "qasym/frechet.hpp"

namespace qasym {

namespace {

using H = HermitianOperator;

// Isometry onto supp(base); empty optional-like flag when the support is everything.
struct Restriction {
  Matrix v;
  bool full = true;

  H apply(const H& a) const {
    if (full) return a;
    return H::hermitian_part(v.adjoint() * a.matrix() * v);
  }
};

Restriction restriction_to(const H& base) {
  const SpectralDecomposition s = eig_hermitian(base);
  const double thr = kSupportRelTol * std::max(s.eigenvalues.maxCoeff(), 0.0);
  int r = 0;
  for (int i = 0; i < s.dim(); ++i) r += s.eigenvalues[i] > thr ? 1 : 0;
  Restriction out;
  if (r == s.dim()) return out;
  if (r == 0) throw SupportError("base state has empty support");
  out.full = false;
  out.v.resize(s.dim(), r);
  int c = 0;
  for (int i = 0; i < s.dim(); ++i) {
    if (s.eigenvalues[i] > thr) out.v.col(c++) = s.eigenvectors.col(i);
  }
  return out;
}

void require_dim(const H& a, int d, const char* who) {
  if (a.dim() != d) {
    std::ostringstream os;
    os << who << ": dimension mismatch (" << a.dim() << " vs " << d << ")";
    throw ParameterError(os.str());
  }
}

void require_supported(const LimitDirection& l, const H& base, const char* who, const char* what) {
  if (!l.supported_on(base)) {
    throw SupportError(std::string(who) + ": " + what + " is not supported on the base state");
  }
}

H power(const H& a, double p) {
  return apply_on_support(eig_hermitian(a), [p](double x) { return std::pow(x, p); });
}

H log_on_support(const H& a) {
  return apply_on_support(eig_hermitian(a), [](double x) { return std::log(x); });
}

H d1(const H& a, ScalarFunction fn, const H& h) { return frechet1(a, fn, h); }

Matrix mm(const H& a) { return a.matrix(); }

double tr(const Matrix& m) { return m.trace().real(); }

void check_petz_alpha(double alpha, const char* who) {
  if (!((alpha > 0.0 && alpha < 1.0) || (alpha > 1.0 && alpha <= 2.0))) {
    std::ostringstream os;
    os << who << ": alpha must lie in (0,1) u (1,2], got " << alpha;
    throw ParameterError(os.str());
  }
}

void check_sandwiched_alpha(double alpha, const char* who) {
  if (!((alpha >= 0.5 && alpha < 1.0) || (alpha > 1.0 && std::isfinite(alpha)))) {
    std::ostringstream os;
    os << who << ": alpha must lie in [1/2,1) u (1,inf), got " << alpha;
    throw ParameterError(os.str());
  }
}

// Common preamble of the alternative-case functionals: rho << sigma,
// L1 << rho, L2 << sigma, then restrict everything to supp(sigma).
struct AltInputs {
  H rho, sigma, l1, l2;
};

AltInputs prepare_alt(const DensityOperator& rho, const DensityOperator& sigma, const LimitDirection& l1,
                      const LimitDirection& l2, const char* who) {
  const int d = rho.dim();
  require_dim(sigma, d, who);
  require_dim(l1.op(), d, who);
  require_dim(l2.op(), d, who);
  if (!support_contained(rho, sigma)) throw SupportError(std::string(who) + ": supp(rho) not in supp(sigma)");
  require_supported(l1, rho, who, "L1");
  require_supported(l2, sigma, who, "L2");
  const Restriction r = restriction_to(sigma);
  return {r.apply(rho), r.apply(sigma), r.apply(l1.op()), r.apply(l2.op())};
}

struct NullInputs {
  H rho, l1, l2;
};

NullInputs prepare_null(const DensityOperator& rho, const LimitDirection& l1, const LimitDirection& l2,
                        const char* who) {
  const int d = rho.dim();
  require_dim(l1.op(), d, who);
  require_dim(l2.op(), d, who);
  require_supported(l1, rho, who, "L1");
  require_supported(l2, rho, who, "L2");
  const Restriction r = restriction_to(rho);
  return {r.apply(rho), r.apply(l1.op()), r.apply(l2.op())};
}

}  // namespace

LimitDirection::LimitDirection(HermitianOperator op, double trace_tol) : op_(std::move(op)) {
  if (std::abs(op_.trace()) > trace_tol) {
    std::ostringstream os;
    os << "limit direction must be traceless, got trace " << op_.trace();
    throw ParameterError(os.str());
  }
}

LimitDirection LimitDirection::zero(int dim) { return LimitDirection(HermitianOperator::zero(dim)); }

bool LimitDirection::supported_on(const HermitianOperator& base, double tol) const {
  if (base.dim() != dim()) throw ParameterError("supported_on: dimension mismatch");
  const Matrix p = support_projector(base).matrix();
  const Matrix& l = op_.matrix();
  return (l - p * l * p).norm() <= tol * std::max(1.0, l.norm());
}

ScalingSequence::ScalingSequence(double e, std::string desc) : exponent(e), description(std::move(desc)) {
  if (!(e > 0.0) || !std::isfinite(e)) throw ParameterError("scaling exponent must be positive");
}

double ScalingSequence::at(double n) const { return std::pow(n, exponent); }

double qre_alt_limit(const DensityOperator& rho, const DensityOperator& sigma, const LimitDirection& l1,
                     const LimitDirection& l2) {
  const AltInputs in = prepare_alt(rho, sigma, l1, l2, "qre_alt_limit");
  const H diff = log_on_support(in.rho) - log_on_support(in.sigma);
  return trace_product(in.l1, diff) - trace_product(in.rho, d1(in.sigma, ScalarFunction::log(), in.l2));
}

double qre_null_limit(const DensityOperator& rho, const LimitDirection& l1, const LimitDirection& l2) {
  const NullInputs in = prepare_null(rho, l1, l2, "qre_null_limit");
  const DividedDifferenceTable t = build_divided_differences(in.rho, ScalarFunction::log());
  const H delta = in.l1 - in.l2;
  const double first = trace_product(in.l1, frechet1(t, delta));
  const double second =
      0.5 * trace_product(in.rho, frechet2(t, in.l1, in.l1) - frechet2(t, in.l2, in.l2));
  return first + second;
}

double vn_entropy_limit(const DensityOperator& rho, const LimitDirection& l) {
  require_dim(l.op(), rho.dim(), "vn_entropy_limit");
  require_supported(l, rho, "vn_entropy_limit", "L");
  const Restriction r = restriction_to(rho);
  return -trace_product(r.apply(l.op()), log_on_support(r.apply(rho)));
}

double petz_alt_limit(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                      const LimitDirection& l1, const LimitDirection& l2) {
  check_petz_alpha(alpha, "petz_alt_limit");
  const AltInputs in = prepare_alt(rho, sigma, l1, l2, "petz_alt_limit");
  const double beta = 1.0 - alpha;
  const H ra = power(in.rho, alpha);
  const H sb = power(in.sigma, beta);
  const double num = trace_product(sb, d1(in.rho, ScalarFunction::power(alpha), in.l1)) +
                     trace_product(ra, d1(in.sigma, ScalarFunction::power(beta), in.l2));
  const double q = trace_product(ra, sb);
  if (!(q > 0.0)) throw SupportError("petz_alt_limit: Tr[rho^a sigma^(1-a)] vanishes");
  return num / ((alpha - 1.0) * q);
}

double petz_null_limit(const DensityOperator& rho, double alpha, const LimitDirection& l1,
                       const LimitDirection& l2) {
  check_petz_alpha(alpha, "petz_null_limit");
  const NullInputs in = prepare_null(rho, l1, l2, "petz_null_limit");
  const double beta = 1.0 - alpha;
  const DividedDifferenceTable ta = build_divided_differences(in.rho, ScalarFunction::power(alpha));
  const DividedDifferenceTable tb = build_divided_differences(in.rho, ScalarFunction::power(beta));
  const H ra = power(in.rho, alpha);
  const H rb = power(in.rho, beta);
  const double v = trace_product(rb, frechet2(ta, in.l1, in.l1)) +
                   trace_product(ra, frechet2(tb, in.l2, in.l2)) +
                   2.0 * trace_product(frechet1(ta, in.l1), frechet1(tb, in.l2));
  return v / (2.0 * (alpha - 1.0));
}

double sandwiched_alt_limit(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                            const LimitDirection& l1, const LimitDirection& l2) {
  check_sandwiched_alpha(alpha, "sandwiched_alt_limit");
  const AltInputs in = prepare_alt(rho, sigma, l1, l2, "sandwiched_alt_limit");
  const double p = (1.0 - alpha) / alpha;
  const Matrix r = mm(power(in.rho, 0.5));
  const Matrix s = mm(power(in.sigma, p));
  const Matrix dr = mm(d1(in.rho, ScalarFunction::power(0.5), in.l1));
  const Matrix ds = mm(d1(in.sigma, ScalarFunction::power(p), in.l2));
  const H x = H::hermitian_part(r * s * r);
  const Matrix xp = dr * s * r + r * s * dr + r * ds * r;
  const double q = trace_product(power(x, alpha), H::identity(x.dim()));
  if (!(q > 0.0)) throw SupportError("sandwiched_alt_limit: rho and sigma are orthogonal");
  return alpha / (alpha - 1.0) * tr(xp * mm(power(x, alpha - 1.0))) / q;
}

double fidelity_limit(const DensityOperator& rho, const DensityOperator& sigma, const LimitDirection& l1,
                      const LimitDirection& l2) {
  const AltInputs in = prepare_alt(rho, sigma, l1, l2, "fidelity_limit");
  const Matrix r = mm(power(in.rho, 0.5));
  const Matrix& s = in.sigma.matrix();
  const Matrix dr = mm(d1(in.rho, ScalarFunction::power(0.5), in.l1));
  const H y = H::hermitian_part(r * s * r);
  const Matrix yp = dr * s * r + r * s * dr + r * in.l2.matrix() * r;
  const double sqrt_f = power(y, 0.5).trace();
  return sqrt_f * tr(yp * mm(power(y, -0.5)));
}

double maxdiv_limit(const DensityOperator& rho, const DensityOperator& sigma, const LimitDirection& l1,
                    const LimitDirection& l2, double gap_tol) {
  const AltInputs in = prepare_alt(rho, sigma, l1, l2, "maxdiv_limit");
  const Matrix r = mm(power(in.rho, 0.5));
  const Matrix si = mm(power(in.sigma, -1.0));
  const Matrix dr = mm(d1(in.rho, ScalarFunction::power(0.5), in.l1));
  const H z = H::hermitian_part(r * si * r);
  const Matrix zp = dr * si * r + r * si * dr - r * si * in.l2.matrix() * si * r;
  const SpectralDecomposition ez = eig_hermitian(z);
  const int d = ez.dim();
  const double top = ez.eigenvalues[d - 1];
  if (d > 1 && top - ez.eigenvalues[d - 2] <= gap_tol * std::max(1.0, top)) {
    std::ostringstream os;
    os << "maxdiv_limit: top eigenvalue " << top << " of rho^1/2 sigma^-1 rho^1/2 is degenerate";
    throw DomainError(os.str());
  }
  const ComplexVector v = ez.eigenvectors.col(d - 1);
  const double proj = (v.adjoint() * zp * v)(0, 0).real();
  return proj / top;
}

double measured_alt_limit(const DensityOperator& rho, const DensityOperator& sigma, const Povm& m_star,
                          const LimitDirection& l1, const LimitDirection& l2) {
  const int d = rho.dim();
  require_dim(sigma, d, "measured_alt_limit");
  require_dim(l1.op(), d, "measured_alt_limit");
  require_dim(l2.op(), d, "measured_alt_limit");
  const RealVector pr = povm_apply(m_star, rho);
  const RealVector ps = povm_apply(m_star, sigma);
  const RealVector p1 = povm_apply(m_star, l1.op());
  const RealVector p2 = povm_apply(m_star, l2.op());
  constexpr double tol = 1e-12;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pr.size(); ++i) {
    if (pr[i] <= tol) {
      if (std::abs(p1[i]) > 1e-10) {
        std::ostringstream os;
        os << "measured_alt_limit: outcome " << i << " has P_rho = 0 but P_L1 != 0";
        throw SupportError(os.str());
      }
      continue;
    }
    if (ps[i] <= tol) {
      std::ostringstream os;
      os << "measured_alt_limit: outcome " << i << " has P_rho > 0 but P_sigma = 0";
      throw SupportError(os.str());
    }
    acc += p1[i] * std::log(pr[i] / ps[i]) - p2[i] * pr[i] / ps[i];
  }
  return acc;
}

double qre_alt_limit_commuting(const DensityOperator& rho, const DensityOperator& sigma,
                               const LimitDirection& l1, const LimitDirection& l2) {
  const AltInputs in = prepare_alt(rho, sigma, l1, l2, "qre_alt_limit_commuting");
  const H diff = log_on_support(in.rho) - log_on_support(in.sigma);
  return trace_product(in.l1, diff) - tr(mm(in.l2) * mm(in.rho) * mm(power(in.sigma, -1.0)));
}

double qre_null_limit_commuting(const DensityOperator& rho, const LimitDirection& l1,
                                const LimitDirection& l2) {
  const NullInputs in = prepare_null(rho, l1, l2, "qre_null_limit_commuting");
  const Matrix delta = mm(in.l1) - mm(in.l2);
  return 0.5 * tr(delta * delta * mm(power(in.rho, -1.0)));
}

double petz_alt_limit_commuting(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                                const LimitDirection& l1, const LimitDirection& l2) {
  check_petz_alpha(alpha, "petz_alt_limit_commuting");
  const AltInputs in = prepare_alt(rho, sigma, l1, l2, "petz_alt_limit_commuting");
  const double beta = 1.0 - alpha;
  const double num = alpha * tr(mm(in.l1) * mm(power(in.sigma, beta)) * mm(power(in.rho, -beta))) +
                     beta * tr(mm(in.l2) * mm(power(in.rho, alpha)) * mm(power(in.sigma, -alpha)));
  const double q = trace_product(power(in.rho, alpha), power(in.sigma, beta));
  return num / ((alpha - 1.0) * q);
}

double petz_null_limit_commuting(const DensityOperator& rho, double alpha, const LimitDirection& l1,
                                 const LimitDirection& l2) {
  check_petz_alpha(alpha, "petz_null_limit_commuting");
  const NullInputs in = prepare_null(rho, l1, l2, "petz_null_limit_commuting");
  const Matrix delta = mm(in.l1) - mm(in.l2);
  return 0.5 * alpha * tr(delta * delta * mm(power(in.rho, -1.0)));
}

}  // namespace qasym
