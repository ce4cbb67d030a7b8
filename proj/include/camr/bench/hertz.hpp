#pragma once

#include <span>
#include <vector>

#include "camr/amr/loop.hpp"

namespace camr {

/// Two elastic half-disks pressed together by prescribed flat-face displacements.
struct HertzParams {
  Material lower{210e9, 0.3};  // solid 1
  Material upper{210e9, 0.3};  // solid 2
  double radius = 2.0;
  double gap = 2.0;      // initial separation delta_0
  double alpha = 0.015;  // u_D = delta_0 / 2 + alpha R
  int n0 = 4;
  int geom_order = 10;

  double prescribed_displacement() const { return 0.5 * gap + alpha * radius; }
  void validate() const;
};

/// Flat faces move toward each other by u_D (vertical component only); the
/// flat-face center node of each solid is fixed horizontally.
ContactBenchmark make_hertz(const HertzParams& params);

/// p(r) = p_O sqrt(a^2 - r^2) / a for r <= a.
struct HertzFit {
  double a = 0.0;
  double p_o = 0.0;
  double residual = 0.0;  // relative L2 misfit over the fitted support
  std::size_t samples = 0;

  double pressure(double r) const;
};

/// Least-squares fit over the contiguous compressive support around r = 0,
/// with samples weighted by their tributary length. Throws Error when the
/// compressive support is empty or covers a single radius.
HertzFit calibrate_hertz(std::span<const PressureSample> profile);

/// Weighted relative L2 distance between profile and fit over r <= extent * a.
double profile_error(std::span<const PressureSample> profile, const HertzFit& fit, double extent = 1.5);

}  // namespace camr
