#include "qasym/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qasym/errors.hpp"

namespace qasym {

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights,
                               Family family, double range_param)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), family_(family),
      range_param_(range_param) {
  if (nodes_.empty() || nodes_.size() != weights_.size()) {
    throw ParameterError("quadrature rule needs matching non-empty node and weight lists");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > 0.0) || !std::isfinite(nodes_[i])) {
      throw ParameterError("quadrature nodes must lie in (0, inf)");
    }
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw ParameterError("quadrature nodes must be strictly increasing");
    }
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      std::ostringstream os;
      os << "quadrature weight " << i << " is not positive and finite";
      throw ParameterError(os.str());
    }
  }
}

QuadratureRule QuadratureRule::coarser() const {
  const int half = std::max(2, node_count() / 2);
  switch (family_) {
    case Family::ExpSinh: return exp_sinh_rule(half, range_param_);
    case Family::GaussLegendreRational: return gauss_legendre_rule(half);
    case Family::Custom: break;
  }
  return *this;
}

QuadratureRule exp_sinh_rule(int node_count, double max_log_tau) {
  if (node_count < 3) throw ParameterError("exp-sinh rule needs at least 3 nodes");
  if (!(max_log_tau > 1.0) || max_log_tau > 600.0) {
    throw ParameterError("exp-sinh range must satisfy 1 < max_log_tau <= 600");
  }
  constexpr double half_pi = std::numbers::pi / 2.0;
  const double u_max = std::asinh(max_log_tau / half_pi);
  const double h = 2.0 * u_max / (node_count - 1);
  std::vector<double> nodes(node_count);
  std::vector<double> weights(node_count);
  for (int i = 0; i < node_count; ++i) {
    const double u = -u_max + h * i;
    const double tau = std::exp(half_pi * std::sinh(u));
    nodes[i] = tau;
    weights[i] = h * half_pi * std::cosh(u) * tau;
  }
  return QuadratureRule(std::move(nodes), std::move(weights), QuadratureRule::Family::ExpSinh,
                        max_log_tau);
}

QuadratureRule gauss_legendre_rule(int node_count) {
  if (node_count < 2) throw ParameterError("Gauss-Legendre rule needs at least 2 nodes");
  const int n = node_count;
  std::vector<double> t(n);
  std::vector<double> wt(n);
  // Newton on P_n from the Chebyshev-like initial guesses; roots come out descending in x.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map x in (-1,1) to t in (0,1)
    t[i] = 0.5 * (1.0 - x);
    t[n - 1 - i] = 0.5 * (1.0 + x);
    wt[i] = wt[n - 1 - i] = 0.5 * w;
  }
  std::vector<double> nodes(n);
  std::vector<double> weights(n);
  for (int i = 0; i < n; ++i) {
    const double one_minus = 1.0 - t[i];
    nodes[i] = t[i] / one_minus;
    weights[i] = wt[i] / (one_minus * one_minus);
  }
  return QuadratureRule(std::move(nodes), std::move(weights),
                        QuadratureRule::Family::GaussLegendreRational);
}

}  // namespace qasym
