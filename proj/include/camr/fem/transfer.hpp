#pragma once

#include <span>
#include <vector>

#include "camr/fem/elasticity.hpp"

namespace camr {

/// Displacement of the full-DOF field `u` at a point of a root's reference square.
Vec2 evaluate_displacement(const Mesh& mesh, const FeSpace& space, std::span<const double> u,
                           int root, Vec2 root_ref);

/// Interpolates `u` (full DOFs on `from`) at the nodes of `to`. Both meshes must
/// come from the same root mesh.
std::vector<double> interpolate(const Mesh& from_mesh, const FeSpace& from_space,
                                std::span<const double> u, const FeSpace& to_space);

struct EnergyComparison {
  /// sqrt of the integral of (eps_a - eps_b) : C : (eps_a - eps_b).
  double difference = 0.0;
  /// Energy norms of a and b alone.
  double norm_a = 0.0;
  double norm_b = 0.0;
};

/// Energy-norm distance between two fields on meshes sharing the same roots.
/// Integration runs on the common refinement of the two leaf sets.
EnergyComparison energy_difference(const Mesh& mesh_a, const FeSpace& space_a,
                                   std::span<const double> u_a, const Mesh& mesh_b,
                                   const FeSpace& space_b, std::span<const double> u_b,
                                   const MaterialTable& materials, int quadrature_points = 3);

}  // namespace camr
