#include "camr/bench/hertz.hpp"

#include <algorithm>
#include <cmath>

#include "camr/mesh/generators.hpp"

namespace camr {

void HertzParams::validate() const {
  lower.validate();
  upper.validate();
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (!(gap >= 0.0)) throw ConfigError("gap must be non-negative");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (n0 < 2) throw ConfigError("n0 must be at least 2");
  if (geom_order < 1) throw ConfigError("geometry order must be >= 1");
}

ContactBenchmark make_hertz(const HertzParams& params) {
  params.validate();
  ContactBenchmark b;
  b.mesh = generate_half_disk_pair(params.radius, params.gap, params.n0, params.geom_order);
  b.materials = {{1, params.lower}, {2, params.upper}};
  b.normal = {0.0, 1.0};
  const double u_d = params.prescribed_displacement();
  b.dirichlet = [u_d](const FeSpace& space, const DofMap& dofs) {
    DirichletSet set;
    const auto nodes = space.nodes_on_tag(tags::kDirichlet);
    if (nodes.empty()) set.warnings.push_back("no Dirichlet nodes");
    std::array<int, 3> center{-1, -1, -1};
    std::array<double, 3> best{INFINITY, INFINITY, INFINITY};
    for (int n : nodes) {
      const int solid = space.node_solid(n);
      set.add(dofs.full_to_conforming[2 * static_cast<std::size_t>(n) + 1], solid == 1 ? u_d : -u_d);
      const double dx = std::abs(space.node_position(n).x);
      if (dx < best[static_cast<std::size_t>(solid)]) {
        best[static_cast<std::size_t>(solid)] = dx;
        center[static_cast<std::size_t>(solid)] = n;
      }
    }
    for (int solid : {1, 2})
      if (center[static_cast<std::size_t>(solid)] >= 0)
        set.add(dofs.full_to_conforming[2 * static_cast<std::size_t>(center[static_cast<std::size_t>(solid)])], 0.0);
    return set;
  };
  return b;
}

double HertzFit::pressure(double r) const {
  const double r2 = a * a - r * r;
  return r2 > 0.0 ? p_o * std::sqrt(r2) / a : 0.0;
}

namespace {

struct Support {
  std::vector<double> r;
  std::vector<double> p;
  std::vector<double> w;
};

// Tributary lengths along the ordered profile.
std::vector<double> tributary(std::span<const PressureSample> profile) {
  std::vector<double> w(profile.size(), 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double left = i > 0 ? profile[i].s - profile[i - 1].s : 0.0;
    const double right = i + 1 < profile.size() ? profile[i + 1].s - profile[i].s : 0.0;
    w[i] = 0.5 * (std::abs(left) + std::abs(right));
  }
  return w;
}

Support compressive_support(std::span<const PressureSample> profile) {
  Support s;
  if (profile.empty()) return s;
  std::size_t center = 0;
  for (std::size_t i = 1; i < profile.size(); ++i)
    if (profile[i].r < profile[center].r) center = i;
  if (!(profile[center].p > 0.0)) return s;
  std::size_t lo = center, hi = center;
  while (lo > 0 && profile[lo - 1].p > 0.0) --lo;
  while (hi + 1 < profile.size() && profile[hi + 1].p > 0.0) ++hi;
  const auto w = tributary(profile);
  for (std::size_t i = lo; i <= hi; ++i) {
    s.r.push_back(profile[i].r);
    s.p.push_back(profile[i].p);
    s.w.push_back(w[i] > 0.0 ? w[i] : 1.0);
  }
  return s;
}

// Optimal p_O for fixed a and the resulting weighted squared misfit.
std::pair<double, double> fit_for(const Support& s, double a) {
  double gg = 0.0, gp = 0.0;
  for (std::size_t i = 0; i < s.r.size(); ++i) {
    const double g = s.r[i] < a ? std::sqrt(a * a - s.r[i] * s.r[i]) / a : 0.0;
    gg += s.w[i] * g * g;
    gp += s.w[i] * g * s.p[i];
  }
  const double p0 = gg > 0.0 ? gp / gg : 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < s.r.size(); ++i) {
    const double g = s.r[i] < a ? std::sqrt(a * a - s.r[i] * s.r[i]) / a : 0.0;
    err += s.w[i] * (s.p[i] - p0 * g) * (s.p[i] - p0 * g);
  }
  return {p0, err};
}

}  // namespace

HertzFit calibrate_hertz(std::span<const PressureSample> profile) {
  const Support s = compressive_support(profile);
  if (s.r.empty()) throw Error("no compressive pressure samples to fit");
  const double r_max = *std::max_element(s.r.begin(), s.r.end());
  const double r_min = *std::min_element(s.r.begin(), s.r.end());
  // Two unknowns need samples at two distinct radii.
  if (!(r_max > r_min)) throw Error("compressive support too narrow to fit (single radius)");
  // Scan then golden-section refine over a; the misfit is unimodal near its minimum.
  double lo = std::max(0.5 * r_max, 1e-12), hi = 3.0 * std::max(r_max, 1e-12);
  double best_a = lo, best_err = INFINITY;
  const int scan = 400;
  for (int k = 0; k <= scan; ++k) {
    const double a = lo + (hi - lo) * k / scan;
    const double err = fit_for(s, a).second;
    if (err < best_err) {
      best_err = err;
      best_a = a;
    }
  }
  double x0 = std::max(lo, best_a - (hi - lo) / scan), x3 = std::min(hi, best_a + (hi - lo) / scan);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && x3 - x0 > 1e-14 * x3; ++it) {
    const double x1 = x3 - g * (x3 - x0), x2 = x0 + g * (x3 - x0);
    if (fit_for(s, x1).second <= fit_for(s, x2).second) x3 = x2;
    else x0 = x1;
  }
  HertzFit fit;
  fit.a = 0.5 * (x0 + x3);
  const auto [p0, err] = fit_for(s, fit.a);
  fit.p_o = p0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < s.p.size(); ++i) norm2 += s.w[i] * s.p[i] * s.p[i];
  fit.residual = std::sqrt(err / norm2);
  fit.samples = s.r.size();
  if (!(fit.a > 0.0 && fit.p_o > 0.0)) throw Error("Hertz fit did not find a positive contact law");
  return fit;
}

double profile_error(std::span<const PressureSample> profile, const HertzFit& fit, double extent) {
  const auto w = tributary(profile);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].r > extent * fit.a) continue;
    const double ref = fit.pressure(profile[i].r);
    num += w[i] * (profile[i].p - ref) * (profile[i].p - ref);
    den += w[i] * ref * ref;
  }
  return den > 0.0 ? std::sqrt(num / den) : INFINITY;
}

}  // namespace camr
