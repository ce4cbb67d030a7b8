#pragma once

// Hierarchical quadrilateral mesh with super-parametric geometry.
//
// Root elements carry an order-q tensor Lagrange geometry. A descendant is
// described by the sub-square of its root's reference square that it covers,
// so its geometry is the root map composed with an affine embedding. That is
// exactly the order-q interpolant of the parent map at the child's nodes, and
// refinement never re-projects onto the exact curve.

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "camr/common.hpp"
#include "camr/mesh/lagrange.hpp"

namespace camr {

namespace tags {
inline constexpr int kNone = 0;
inline constexpr int kDirichlet = 1;
inline constexpr int kContact1 = 2;
inline constexpr int kContact2 = 3;
}  // namespace tags

/// Axis-aligned square inside the root reference square [-1,1]^2.
struct SubSquare {
  double x0 = -1.0;
  double y0 = -1.0;
  double size = 2.0;

  /// Element reference point -> root reference point.
  Vec2 to_root(Vec2 ref) const {
    return {x0 + 0.5 * (ref.x + 1.0) * size, y0 + 0.5 * (ref.y + 1.0) * size};
  }
  Vec2 from_root(Vec2 r) const {
    return {2.0 * (r.x - x0) / size - 1.0, 2.0 * (r.y - y0) / size - 1.0};
  }
};

/// Local numbering: corners counterclockwise from reference (-1,-1); edge e joins
/// corners e and (e+1)%4; children are SW, SE, NE, NW.
struct Element {
  std::array<int, 4> corners{};
  std::array<int, 4> edge_tags{};
  int level = 0;
  int parent = -1;
  std::array<int, 4> children{-1, -1, -1, -1};
  int root = 0;
  SubSquare box;
  int solid = 1;

  bool is_leaf() const { return children[0] < 0; }
};

/// Where a vertex sits: a root element and a point of its reference square.
struct VertexHome {
  int root = -1;
  Vec2 ref;
};

struct BoundaryEdge {
  int element = -1;
  int local_edge = -1;
  int tag = tags::kNone;
};

struct HangingConstraint {
  int slave = -1;
  std::vector<int> masters;
  std::vector<double> weights;
};

/// Geometry map value and Jacobian at a reference point.
struct MapPoint {
  Vec2 x;
  // Columns: d x / d xi, d x / d eta.
  Vec2 dxi;
  Vec2 deta;

  double det() const { return dxi.x * deta.y - deta.x * dxi.y; }
};

inline std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(a < b ? a : b);
  const auto hi = static_cast<std::uint64_t>(a < b ? b : a);
  return (lo << 32) | hi;
}

class Mesh {
 public:
  explicit Mesh(int geom_order);

  int geom_order() const { return q_; }

  // Construction (roots only, before any refinement).
  int add_vertex(Vec2 position);
  /// geom_nodes holds (q+1)^2 points in tensor order (xi fastest).
  int add_root(int solid, std::array<int, 4> corners, std::vector<Vec2> geom_nodes,
               std::array<int, 4> edge_tags = {});

  // Queries.
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_roots() const { return num_roots_; }
  const Vec2& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const VertexHome& vertex_home(int v) const { return homes_[static_cast<std::size_t>(v)]; }
  const Element& element(int e) const { return elements_[static_cast<std::size_t>(e)]; }
  const std::vector<Element>& elements() const { return elements_; }

  /// Leaf element ids in ascending order.
  std::vector<int> leaves() const;
  std::size_t num_leaves() const;
  int max_level() const;
  std::vector<BoundaryEdge> boundary_edges() const;

  MapPoint map_root(int root, Vec2 root_ref) const;
  MapPoint map(int e, Vec2 ref) const;
  Vec2 geometry_map(int e, Vec2 ref) const { return map(e, ref).x; }
  /// The element's own (q+1)^2 geometric nodes.
  std::vector<Vec2> geometry_nodes(int e) const;

  /// Area by Gauss quadrature with max(q+1, 2) points per direction.
  double element_measure(int e) const;
  double total_leaf_measure() const;
  /// Longest corner diagonal.
  double element_diameter(int e) const;

  /// Leaf of the tree under `root` containing root reference point r.
  int locate_leaf(int root, Vec2 r) const;

  int edge_midpoint(int a, int b) const;

  // Refinement.
  /// Marked set closed under the 2:1 rule (iterative marking, ascending id order).
  std::set<int> two_to_one_closure(const std::set<int>& marked) const;
  /// Refines the closure of `marked`; returns the ids that were split.
  std::vector<int> refine_in_place(const std::set<int>& marked);

  std::vector<HangingConstraint> hanging_constraints() const;

  /// Returns human-readable violations of the mesh invariants (empty when valid).
  std::vector<std::string> check_invariants(double measure_reference = -1.0) const;
  std::vector<std::string> two_to_one_violations() const;

 private:
  struct EdgeOwner {
    int element = -1;
    int local_edge = -1;
  };
  using EdgeOwners = std::unordered_map<std::uint64_t, std::vector<EdgeOwner>>;

  EdgeOwners leaf_edge_owners() const;
  int midpoint_vertex(int parent, int local_edge);
  void split(int e);

  int q_;
  LagrangeBasis1D basis_;
  std::vector<Vec2> vertices_;
  std::vector<VertexHome> homes_;
  std::vector<Element> elements_;
  std::size_t num_roots_ = 0;
  std::vector<Vec2> root_geom_;
  std::unordered_map<std::uint64_t, int> edge_mid_;
  std::unordered_map<std::uint64_t, std::uint64_t> edge_parent_;
};

/// Functional refinement.
Mesh refine(const Mesh& mesh, const std::set<int>& marked);
Mesh refine_uniformly(const Mesh& mesh, int levels);

}  // namespace camr
