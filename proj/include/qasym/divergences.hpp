#pragma once

// Quantum divergences in nats. Support failures are reported as a tagged
// +inf value rather than a floating-point infinity.

#include <optional>
#include <string>
#include <vector>

#include "qasym/operator_core.hpp"

namespace qasym {

/// Finite list of PSD operators summing to the identity.
class Povm {
 public:
  /// Throws ParameterError unless every element is PSD within tol and the
  /// elements sum to I within tol (max-abs).
  explicit Povm(std::vector<HermitianOperator> elements, double tol = 1e-10);

  static Povm trivial(int dim);
  static Povm computational_basis(int dim);
  /// Rank-one projectors onto the eigenvectors of `a` (ascending eigenvalue order).
  static Povm projective(const HermitianOperator& a);

  const std::vector<HermitianOperator>& elements() const { return elements_; }
  int outcome_count() const { return static_cast<int>(elements_.size()); }
  int dim() const { return elements_.front().dim(); }

 private:
  std::vector<HermitianOperator> elements_;
};

/// (Tr[M_i A])_i.
RealVector povm_apply(const Povm& m, const HermitianOperator& a);

class DivergenceValue {
 public:
  static DivergenceValue finite(double v, std::string diagnostics = {});
  static DivergenceValue infinite(std::string diagnostics);

  bool support_ok() const { return support_ok_; }
  bool is_infinite() const { return !support_ok_; }
  /// Throws DomainError on +inf.
  double value() const;
  const std::string& diagnostics() const { return diagnostics_; }
  /// "inf" or %.17g.
  std::string to_string() const;

 private:
  DivergenceValue(bool ok, double v, std::string diag)
      : support_ok_(ok), value_(v), diagnostics_(std::move(diag)) {}
  bool support_ok_;
  double value_;
  std::string diagnostics_;
};

DivergenceValue umegaki(const DensityOperator& rho, const DensityOperator& sigma, double tol = 1e-10);
double von_neumann_entropy(const DensityOperator& rho);
DivergenceValue classical_kl(const RealVector& p, const RealVector& q, double tol = 1e-10);
/// Classical Renyi divergence (alpha-1)^{-1} log sum p^a q^{1-a}; commuting oracle.
DivergenceValue classical_renyi(const RealVector& p, const RealVector& q, double alpha,
                                double tol = 1e-10);

/// alpha in (0,1) u (1,2].
DivergenceValue petz_renyi(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                           double tol = 1e-10);
/// alpha in [1/2,1) u (1,inf).
DivergenceValue sandwiched_renyi(const DensityOperator& rho, const DensityOperator& sigma,
                                 double alpha, double tol = 1e-10);

/// rho^{1/2} sigma^{(1-alpha)/alpha} rho^{1/2}, negative powers taken on supp(sigma).
HermitianOperator sandwiched_core(const DensityOperator& rho, const DensityOperator& sigma,
                                  double alpha);
/// X^{alpha-1} / ||X||_alpha^{alpha-1} with X = sandwiched_core.
HermitianOperator sandwiched_dual_optimizer(const DensityOperator& rho, const DensityOperator& sigma,
                                            double alpha);
/// alpha/(alpha-1) log Tr[X eta].
double sandwiched_variational_objective(const DensityOperator& rho, const DensityOperator& sigma,
                                        double alpha, const HermitianOperator& eta);

double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

DivergenceValue max_divergence(const DensityOperator& rho, const DensityOperator& sigma,
                               double tol = 1e-10);
/// Smallest lambda with rho <= e^lambda sigma, by bisection on the Loewner test.
DivergenceValue max_divergence_bisection(const DensityOperator& rho, const DensityOperator& sigma,
                                         double tol = 1e-10, double lambda_tol = 1e-12);

struct MeasuredResult {
  DivergenceValue value;
  int argmax;
  /// Every family index within 1e-9 of the maximum (uniqueness diagnostic).
  std::vector<int> near_max;
};

MeasuredResult measured_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma,
                                         const std::vector<Povm>& family, double tol = 1e-10);

}  // namespace qasym
