#pragma once

// Frechet derivatives of log and real powers of Hermitian matrices.
//
// The primary path is spectral: in the eigenbasis of A,
//   D[f(A)](H)_{ij}      = f[l_i, l_j] * H_{ij}
//   D^2[f(A)](H1,H2)_{ij} = sum_k f[l_i, l_k, l_j] (H1_{ik} H2_{kj} + H2_{ik} H1_{kj})
// with f[.,.] and f[.,.,.] the first and second divided differences.
// The resolvent integrals (tau I + A)^{-1} ... are kept as independent oracles.

#include <optional>
#include <string>
#include <vector>

#include "qasym/operator_core.hpp"
#include "qasym/quadrature.hpp"

namespace qasym {

inline constexpr double kCoalesceTol = 1e-8;

/// log or x^alpha, with first and second derivatives.
class ScalarFunction {
 public:
  static ScalarFunction log();
  static ScalarFunction power(double exponent);

  bool is_log() const { return is_log_; }
  double exponent() const { return exponent_; }
  bool is_integer_power() const;
  /// Integer powers with closed-form derivative formulas (k >= 0 or k = -1).
  bool has_exact_derivatives() const;

  bool in_domain(double x) const;
  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  std::string name() const;

  /// f[x, y]; switches to f'((x+y)/2) when |x - y| <= tol * max(|x|, |y|, 1).
  double divided1(double x, double y, double coalesce_tol = kCoalesceTol) const;
  /// f[x, y, z], symmetric in its arguments; coalesces pairwise by the same rule.
  double divided2(double x, double y, double z, double coalesce_tol = kCoalesceTol) const;

 private:
  ScalarFunction(bool is_log, double exponent) : is_log_(is_log), exponent_(exponent) {}
  bool is_log_;
  double exponent_;
};

/// Divided-difference data at a base point A; immutable once built.
struct DividedDifferenceTable {
  ScalarFunction fn;
  HermitianOperator base;
  SpectralDecomposition eigen;
  Eigen::MatrixXd first;      // f[l_i, l_j]
  std::vector<double> second; // f[l_i, l_k, l_j] at (i * d + k) * d + j

  int dim() const { return eigen.dim(); }
  double second_at(int i, int k, int j) const {
    const int d = dim();
    return second[(static_cast<std::size_t>(i) * d + k) * d + j];
  }
};

/// Throws DomainError listing the first eigenvalue outside the domain of fn.
DividedDifferenceTable build_divided_differences(const HermitianOperator& a, ScalarFunction fn,
                                                 double coalesce_tol = kCoalesceTol);

HermitianOperator frechet1(const DividedDifferenceTable& table, const HermitianOperator& h);
HermitianOperator frechet2(const DividedDifferenceTable& table, const HermitianOperator& h1,
                           const HermitianOperator& h2);

HermitianOperator frechet1(const HermitianOperator& a, ScalarFunction fn, const HermitianOperator& h);
HermitianOperator frechet2(const HermitianOperator& a, ScalarFunction fn, const HermitianOperator& h1,
                           const HermitianOperator& h2);

/// f(A) through the spectral decomposition.
HermitianOperator matrix_function(const HermitianOperator& a, ScalarFunction fn);

struct QuadratureEstimate {
  HermitianOperator value;
  /// max-abs difference against the same integral on rule.coarser().
  double error_estimate;
};

/// int_0^inf (tau I + A)^{-1} H (tau I + A)^{-1} dtau.  Requires A > 0.
QuadratureEstimate frechet1_log_quadrature(const HermitianOperator& a, const HermitianOperator& h,
                                           const QuadratureRule& rule = exp_sinh_rule());

/// -int_0^inf R H1 R H2 R + R H2 R H1 R dtau, R = (tau I + A)^{-1}.  Requires A > 0.
QuadratureEstimate frechet2_log_quadrature(const HermitianOperator& a, const HermitianOperator& h1,
                                           const HermitianOperator& h2,
                                           const QuadratureRule& rule = exp_sinh_rule());

/// D[A^alpha](H) (order 1) or D^2[A^alpha](H, H2) (order 2) from the
/// resolvent representations of A^alpha, alpha in (-1,0) u (0,1) u (1,2).
/// Requires A > 0; `h2` must be given iff order == 2.
QuadratureEstimate frechet_power_quadrature(const HermitianOperator& a, const HermitianOperator& h,
                                            double alpha, int order,
                                            const std::optional<HermitianOperator>& h2 = std::nullopt,
                                            const QuadratureRule& rule = exp_sinh_rule());

/// || (f(A + hH) - f(A - hH)) / 2h - D[f(A)](H) ||_1.
/// Throws DomainError if A +- hH leaves the domain of fn.
double finite_difference_check(ScalarFunction fn, const HermitianOperator& a,
                               const HermitianOperator& h, double h_step);

}  // namespace qasym
