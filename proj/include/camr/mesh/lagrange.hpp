#pragma once

#include <span>
#include <vector>

namespace camr {

/// 1D Lagrange basis of order q on equispaced nodes t_i = -1 + 2i/q.
class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(int order);

  int order() const { return order_; }
  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  /// Fills values (and derivatives when non-empty) at t. Spans hold order()+1 entries.
  void eval(double t, std::span<double> values, std::span<double> derivs = {}) const;

 private:
  int order_;
  std::vector<double> nodes_;
  std::vector<double> inv_denom_;
};

/// Gauss-Legendre rule with n points on [-1, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

}  // namespace camr
