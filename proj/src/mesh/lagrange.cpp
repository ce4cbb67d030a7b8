#include "camr/mesh/lagrange.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "camr/common.hpp"

namespace camr {

LagrangeBasis1D::LagrangeBasis1D(int order) : order_(order) {
  if (order < 1 || order > 40) throw ConfigError("Lagrange basis order must be in [1, 40]");
  nodes_.resize(static_cast<std::size_t>(order + 1));
  inv_denom_.resize(nodes_.size());
  for (int i = 0; i <= order; ++i) nodes_[i] = -1.0 + 2.0 * i / order;
  for (int i = 0; i <= order; ++i) {
    double d = 1.0;
    for (int j = 0; j <= order; ++j)
      if (j != i) d *= nodes_[i] - nodes_[j];
    inv_denom_[i] = 1.0 / d;
  }
}

void LagrangeBasis1D::eval(double t, std::span<double> values, std::span<double> derivs) const {
  const int n = order_ + 1;
  // diff[j] = t - t_j; products built with prefix/suffix sweeps so a node hit is handled
  // without division.
  double diff[64];
  double prefix[65];
  double suffix[65];
  for (int j = 0; j < n; ++j) diff[j] = t - nodes_[j];
  prefix[0] = 1.0;
  for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * diff[j];
  suffix[n] = 1.0;
  for (int j = n - 1; j >= 0; --j) suffix[j] = suffix[j + 1] * diff[j];
  for (int i = 0; i < n; ++i) values[i] = prefix[i] * suffix[i + 1] * inv_denom_[i];
  if (derivs.empty()) return;
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    double dp = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      dp = dp * diff[j] + p;
      p *= diff[j];
    }
    derivs[i] = dp * inv_denom_[i];
  }
}

namespace {

GaussRule compute_gauss(int n) {
  GaussRule rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.points[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 40) throw ConfigError("Gauss rule size out of range");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

}  // namespace camr
