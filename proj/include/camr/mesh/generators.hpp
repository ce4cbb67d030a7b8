#pragma once

#include <array>
#include <functional>
#include <map>
#include <tuple>

#include "camr/mesh/mesh.hpp"

namespace camr {

/// Assembles structured, conforming root meshes out of mapped blocks.
///
/// Vertices of different blocks are merged by position within one solid only,
/// so solids never share nodes even when they touch.
class MeshBuilder {
 public:
  using BlockMap = std::function<Vec2(double u, double v)>;

  MeshBuilder(int geom_order, double length_scale);

  /// Adds nu x nv elements covering map([0,1]^2). Side tags are given as
  /// {v=0, u=1, v=1, u=0}. With reverse_u the elements run in decreasing u,
  /// which keeps them counterclockwise when `map` is orientation-reversing.
  void add_block(int solid, int nu, int nv, const BlockMap& map, std::array<int, 4> side_tags,
                 bool reverse_u = false);

  /// Validates positivity of all initial Jacobians and returns the mesh.
  Mesh build();

 private:
  int find_or_add_vertex(int solid, Vec2 p);

  Mesh mesh_;
  double tol_;
  std::map<std::tuple<int, long long, long long>, int> lookup_;
};

/// Layout of the two half-disk benchmark bodies.
struct HalfDiskLayout {
  double radius = 2.0;
  double gap = 2.0;

  /// Solid 1 sits below, bulging upward; solid 2 is its mirror image above.
  double lower_flat_y() const { return -(0.5 * gap + radius); }
  double upper_flat_y() const { return 0.5 * gap + radius; }
};

/// Two half-disks of radius R whose arcs face each other across `gap`, each
/// split into a central rectangle and three arc blocks. Flat sides are tagged
/// Dirichlet and arcs Contact1 (lower, solid 1) / Contact2 (upper, solid 2).
Mesh generate_half_disk_pair(double radius, double gap, int n0, int geom_order);

/// nx x ny rectangle [origin, origin + (width, height)] of one solid.
Mesh make_rectangle(int nx, int ny, Vec2 origin, double width, double height, int geom_order,
                    std::array<int, 4> side_tags = {}, int solid = 1);

/// Two stacked rectangles of width x height separated vertically by gap:
/// solid 1 below (top tagged Contact1), solid 2 above (bottom tagged Contact2),
/// outer horizontal sides tagged Dirichlet.
Mesh make_stacked_blocks(int nx, int ny, double width, double height, double gap, int geom_order);

}  // namespace camr
