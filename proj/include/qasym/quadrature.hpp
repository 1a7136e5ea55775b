#pragma once

#include <vector>

namespace qasym {

/// Positive-weight rule for integrals over tau in (0, inf).
class QuadratureRule {
 public:
  enum class Family { ExpSinh, GaussLegendreRational, Custom };

  /// Throws ParameterError unless nodes are strictly increasing in (0, inf)
  /// and weights are positive and finite.
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights,
                 Family family = Family::Custom, double range_param = 0.0);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  Family family() const { return family_; }

  /// Same family with about half the nodes; used for error estimates.
  /// Custom rules return themselves.
  QuadratureRule coarser() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Family family_;
  double range_param_;
};

/// tau = exp((pi/2) sinh u), trapezoid in u over the range where
/// |log tau| <= max_log_tau. Handles the algebraic endpoint behaviour of
/// tau^a (tau I + A)^{-k} integrands without special weights.
QuadratureRule exp_sinh_rule(int node_count = 200, double max_log_tau = 300.0);

/// tau = t / (1 - t) with Gauss-Legendre nodes on (0, 1).
QuadratureRule gauss_legendre_rule(int node_count = 200);

}  // namespace qasym
