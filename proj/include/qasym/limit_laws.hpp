#pragma once

// Deterministic limit functionals of (L1, L2): the weak limits of
// r_n(rho_n - rho) and r_n(sigma_n - sigma). Alternative-case functionals
// are evaluated on supp(sigma), null-case ones on supp(rho).

#include <string>

#include "qasym/divergences.hpp"
#include "qasym/operator_core.hpp"

namespace qasym {

/// Traceless Hermitian direction.
class LimitDirection {
 public:
  /// Throws ParameterError if |Tr L| > trace_tol.
  explicit LimitDirection(HermitianOperator op, double trace_tol = 1e-9);
  static LimitDirection zero(int dim);

  const HermitianOperator& op() const { return op_; }
  int dim() const { return op_.dim(); }

  /// ||L - P L P||_F <= tol * max(1, ||L||_F) with P the support projector of `base`.
  bool supported_on(const HermitianOperator& base, double tol = 1e-8) const;

 private:
  HermitianOperator op_;
};

/// r_n = n^exponent.
struct ScalingSequence {
  double exponent;
  std::string description;

  explicit ScalingSequence(double e, std::string desc = {});
  double at(double n) const;
};

double qre_alt_limit(const DensityOperator& rho, const DensityOperator& sigma,
                     const LimitDirection& l1, const LimitDirection& l2);
/// Tr[L1 D[log rho](L1-L2)] + 1/2 Tr[rho (D^2[log rho](L1,L1) - D^2[log rho](L2,L2))].
double qre_null_limit(const DensityOperator& rho, const LimitDirection& l1, const LimitDirection& l2);
double vn_entropy_limit(const DensityOperator& rho, const LimitDirection& l);

double petz_alt_limit(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                      const LimitDirection& l1, const LimitDirection& l2);
double petz_null_limit(const DensityOperator& rho, double alpha, const LimitDirection& l1,
                       const LimitDirection& l2);

double sandwiched_alt_limit(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                            const LimitDirection& l1, const LimitDirection& l2);

double fidelity_limit(const DensityOperator& rho, const DensityOperator& sigma,
                      const LimitDirection& l1, const LimitDirection& l2);
/// Throws DomainError when the top eigenvalue of rho^{1/2} sigma^{-1} rho^{1/2}
/// is not separated from the next one by more than gap_tol (relative).
double maxdiv_limit(const DensityOperator& rho, const DensityOperator& sigma,
                    const LimitDirection& l1, const LimitDirection& l2, double gap_tol = 1e-8);

double measured_alt_limit(const DensityOperator& rho, const DensityOperator& sigma, const Povm& m_star,
                          const LimitDirection& l1, const LimitDirection& l2);

// Closed forms valid when rho, sigma, L1, L2 all commute.
double qre_alt_limit_commuting(const DensityOperator& rho, const DensityOperator& sigma,
                               const LimitDirection& l1, const LimitDirection& l2);
double qre_null_limit_commuting(const DensityOperator& rho, const LimitDirection& l1,
                                const LimitDirection& l2);
double petz_alt_limit_commuting(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                                const LimitDirection& l1, const LimitDirection& l2);
/// (alpha/2) Tr[(L1-L2)^2 rho^{-1}].
double petz_null_limit_commuting(const DensityOperator& rho, double alpha, const LimitDirection& l1,
                                 const LimitDirection& l2);

}  // namespace qasym
