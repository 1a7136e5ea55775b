#include "qasym/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qasym/errors.hpp"

namespace qasym {

namespace {

void fix_phases(Matrix& vecs) {
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
    for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
      const double mag = std::abs(vecs(r, c));
      if (mag > 1e-12) {
        vecs.col(c) *= std::conj(vecs(r, c)) / mag;
        vecs(r, c) = Complex(mag, 0.0);
        break;
      }
    }
  }
}

HermitianOperator assemble(const SpectralDecomposition& s, const RealVector& values) {
  const Matrix& u = s.eigenvectors;
  return HermitianOperator::hermitian_part(u * values.cast<Complex>().asDiagonal() * u.adjoint());
}

}  // namespace

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

HermitianOperator::HermitianOperator(Matrix entries) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    std::ostringstream os;
    os << "HermitianOperator needs a non-empty square matrix, got " << entries.rows() << "x"
       << entries.cols();
    throw ParameterError(os.str());
  }
  const double asym = max_abs(entries - entries.adjoint());
  const double gate = kHermitianGate * std::max(1.0, max_abs(entries));
  if (!(asym <= gate)) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |A - A^dagger| = " << asym;
    throw ParameterError(os.str());
  }
  entries_ = (entries + entries.adjoint()) * 0.5;
}

HermitianOperator HermitianOperator::hermitian_part(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ParameterError("hermitian_part needs a non-empty square matrix");
  }
  return HermitianOperator((m + m.adjoint()) * 0.5, Trusted{});
}

HermitianOperator HermitianOperator::zero(int dim) {
  if (dim < 1) throw ParameterError("dimension must be >= 1");
  return HermitianOperator(Matrix::Zero(dim, dim), Trusted{});
}

HermitianOperator HermitianOperator::identity(int dim) {
  if (dim < 1) throw ParameterError("dimension must be >= 1");
  return HermitianOperator(Matrix::Identity(dim, dim), Trusted{});
}

HermitianOperator HermitianOperator::diagonal(const RealVector& diag) {
  if (diag.size() < 1) throw ParameterError("dimension must be >= 1");
  return HermitianOperator(Matrix(diag.cast<Complex>().asDiagonal()), Trusted{});
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw ParameterError("dimension mismatch in operator +");
  return HermitianOperator(entries_ + other.entries_, Trusted{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw ParameterError("dimension mismatch in operator -");
  return HermitianOperator(entries_ - other.entries_, Trusted{});
}

HermitianOperator HermitianOperator::operator-() const {
  return HermitianOperator(-entries_, Trusted{});
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(entries_ * s, Trusted{});
}

double SpectralDecomposition::max_abs_eigenvalue() const {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

HermitianOperator SpectralDecomposition::reconstruct() const { return assemble(*this, eigenvalues); }

DensityOperator::DensityOperator(HermitianOperator op) : op_(std::move(op)) {
  const double tr = op_.trace();
  if (std::abs(tr - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "density operator must have unit trace, got " << tr;
    throw ParameterError(os.str());
  }
  const double lo = min_eigenvalue(op_);
  if (lo < -1e-10) {
    std::ostringstream os;
    os << "density operator must be positive semidefinite, min eigenvalue " << lo;
    throw ParameterError(os.str());
  }
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  return DensityOperator(HermitianOperator::identity(dim) * (1.0 / dim));
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (psi.size() < 1 || norm == 0.0) throw ParameterError("pure state needs a nonzero vector");
  const ComplexVector v = psi / norm;
  return DensityOperator(HermitianOperator::hermitian_part(v * v.adjoint()));
}

DensityOperator DensityOperator::diagonal(const RealVector& probabilities) {
  return DensityOperator(HermitianOperator::diagonal(probabilities));
}

SpectralDecomposition eig_hermitian(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigensolver did not converge (dimension " << a.dim() << ")";
    throw NumericError(os.str());
  }
  SpectralDecomposition s{solver.eigenvalues(), solver.eigenvectors()};
  fix_phases(s.eigenvectors);
  return s;
}

RealVector eigenvalues(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigensolver did not converge (dimension " << a.dim() << ")";
    throw NumericError(os.str());
  }
  return solver.eigenvalues();
}

double min_eigenvalue(const HermitianOperator& a) { return eigenvalues(a).minCoeff(); }
double max_eigenvalue(const HermitianOperator& a) { return eigenvalues(a).maxCoeff(); }

HermitianOperator apply_scalar_function(const SpectralDecomposition& s,
                                        const std::function<double(double)>& f) {
  RealVector values(s.dim());
  for (int i = 0; i < s.dim(); ++i) {
    values[i] = f(s.eigenvalues[i]);
    if (!std::isfinite(values[i])) {
      std::ostringstream os;
      os << "scalar function is not finite at eigenvalue " << s.eigenvalues[i];
      throw DomainError(os.str());
    }
  }
  return assemble(s, values);
}

HermitianOperator apply_on_support(const SpectralDecomposition& s,
                                   const std::function<double(double)>& f, double rel_tol) {
  const double cut = rel_tol * s.max_abs_eigenvalue();
  return apply_scalar_function(s, [&](double x) { return std::abs(x) <= cut ? 0.0 : f(x); });
}

double schatten_norm(const HermitianOperator& a, double p) {
  if (!(p >= 1.0)) throw ParameterError("Schatten norm needs p >= 1");
  const RealVector mags = eigenvalues(a).cwiseAbs();
  if (std::isinf(p)) return mags.maxCoeff();
  const double top = mags.maxCoeff();
  if (top == 0.0) return 0.0;
  // scale out the largest magnitude so large p does not overflow
  double sum = 0.0;
  for (double m : mags) sum += std::pow(m / top, p);
  return top * std::pow(sum, 1.0 / p);
}

HermitianOperator support_projector(const HermitianOperator& a, double rel_tol) {
  const SpectralDecomposition s = eig_hermitian(a);
  const double cut = rel_tol * std::max(0.0, s.eigenvalues.maxCoeff());
  RealVector mask(s.dim());
  for (int i = 0; i < s.dim(); ++i) mask[i] = s.eigenvalues[i] > cut && s.eigenvalues[i] > 0.0;
  return assemble(s, mask);
}

bool support_contained(const HermitianOperator& a, const HermitianOperator& b, double tol) {
  if (a.dim() != b.dim()) throw ParameterError("dimension mismatch in support_contained");
  const Matrix complement = Matrix::Identity(a.dim(), a.dim()) - support_projector(b).matrix();
  const double leak = (complement * a.matrix() * complement).trace().real();
  return leak <= tol;
}

HermitianOperator moore_penrose_inverse(const HermitianOperator& a, double rel_tol) {
  return apply_on_support(eig_hermitian(a), [](double x) { return 1.0 / x; }, rel_tol);
}

bool loewner_leq(const HermitianOperator& a, const HermitianOperator& b, double tol) {
  if (a.dim() != b.dim()) throw ParameterError("dimension mismatch in loewner_leq");
  return min_eigenvalue(b - a) >= -tol;
}

RealVector project_to_simplex(const RealVector& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw ParameterError("cannot project an empty vector onto the simplex");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    running += u[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

DensityOperator project_to_density(const HermitianOperator& a) {
  const SpectralDecomposition s = eig_hermitian(a);
  if (std::abs(a.trace() - 1.0) <= 1e-10 && s.eigenvalues.minCoeff() >= -1e-10) {
    return DensityOperator(a);
  }
  return DensityOperator(assemble(s, project_to_simplex(s.eigenvalues)));
}

double trace_product(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw ParameterError("dimension mismatch in trace_product");
  }
  return (a.array() * b.transpose().array()).sum().real();
}

}  // namespace qasym
