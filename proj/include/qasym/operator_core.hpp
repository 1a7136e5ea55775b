#pragma once

#include <complex>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace qasym {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative cutoff below which an eigenvalue is treated as zero when
/// deciding supports, kernels and pseudo-inverses.
inline constexpr double kSupportRelTol = 1e-10;

/// Absolute asymmetry allowed when wrapping a matrix as Hermitian.
inline constexpr double kHermitianGate = 1e-12;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense d x d complex Hermitian matrix. Symmetrized on construction.
class HermitianOperator {
 public:
  /// Throws ParameterError if `entries` is not square, empty, or deviates
  /// from Hermitian by more than kHermitianGate * max(1, max|entry|).
  explicit HermitianOperator(Matrix entries);

  /// Wraps the Hermitian part (M + M^dagger)/2 without the asymmetry gate.
  /// For products that are Hermitian in exact arithmetic.
  static HermitianOperator hermitian_part(const Matrix& m);

  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);
  static HermitianOperator diagonal(const RealVector& diag);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  Complex operator()(int i, int j) const { return entries_(i, j); }
  double trace() const { return entries_.trace().real(); }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator-() const;
  HermitianOperator operator*(double s) const;
  friend HermitianOperator operator*(double s, const HermitianOperator& a) { return a * s; }

 private:
  struct Trusted {};
  HermitianOperator(Matrix entries, Trusted) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Eigenvalues ascending; eigenvector columns with the first non-negligible
/// component made real positive.
struct SpectralDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  double max_abs_eigenvalue() const;
  HermitianOperator reconstruct() const;
};

/// Hermitian operator with unit trace and non-negative spectrum.
class DensityOperator {
 public:
  /// Throws ParameterError unless |Tr - 1| <= 1e-10 and all eigenvalues >= -1e-10.
  explicit DensityOperator(HermitianOperator op);

  static DensityOperator maximally_mixed(int dim);
  static DensityOperator pure(const ComplexVector& psi);
  static DensityOperator diagonal(const RealVector& probabilities);

  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  int dim() const { return op_.dim(); }
  operator const HermitianOperator&() const { return op_; }

 private:
  HermitianOperator op_;
};

SpectralDecomposition eig_hermitian(const HermitianOperator& a);
RealVector eigenvalues(const HermitianOperator& a);
double min_eigenvalue(const HermitianOperator& a);
double max_eigenvalue(const HermitianOperator& a);

/// U diag(f(lambda)) U^dagger. Throws DomainError naming the first eigenvalue
/// on which f is not finite.
HermitianOperator apply_scalar_function(const SpectralDecomposition& s,
                                        const std::function<double(double)>& f);

/// Like apply_scalar_function but eigenvalues with |lambda| <= rel_tol * max|lambda|
/// are sent to 0 without evaluating f (kernel masking for log and negative powers).
HermitianOperator apply_on_support(const SpectralDecomposition& s,
                                   const std::function<double(double)>& f,
                                   double rel_tol = kSupportRelTol);

/// p in [1, inf]; pass kInf for the operator norm.
double schatten_norm(const HermitianOperator& a, double p);

HermitianOperator support_projector(const HermitianOperator& a, double rel_tol = kSupportRelTol);

/// True iff Tr[(I - P_B) A (I - P_B)] <= tol with P_B the support projector of B.
bool support_contained(const HermitianOperator& a, const HermitianOperator& b,
                       double tol = 1e-10);

HermitianOperator moore_penrose_inverse(const HermitianOperator& a,
                                        double rel_tol = kSupportRelTol);

/// A <= B in the Loewner order, i.e. min eig(B - A) >= -tol.
bool loewner_leq(const HermitianOperator& a, const HermitianOperator& b, double tol = 1e-10);

/// Euclidean projection onto the probability simplex (sort-and-shift).
RealVector project_to_simplex(const RealVector& v);

/// Frobenius-nearest density operator.
DensityOperator project_to_density(const HermitianOperator& a);

/// Re Tr[A B].
double trace_product(const Matrix& a, const Matrix& b);
inline double trace_product(const HermitianOperator& a, const HermitianOperator& b) {
  return trace_product(a.matrix(), b.matrix());
}

/// Max-abs entry.
double max_abs(const Matrix& m);

}  // namespace qasym
