#pragma once

// Continuous Lagrange displacement space (Q1 or Q2) on the leaves of a Mesh.
//
// Q1 nodes are the mesh vertices, so node ids equal vertex ids and survive
// refinement. Q2 adds one node per leaf edge and one per leaf; it is only
// available on meshes without hanging nodes.

#include <array>
#include <vector>

#include "camr/mesh/mesh.hpp"

namespace camr {

/// Reference coordinates of the local nodes: corners (CCW), then for Q2 the
/// edge midpoints (edge e between corners e and e+1) and the center.
const std::vector<Vec2>& reference_nodes(int order);

/// Tensor Lagrange shape functions and reference derivatives at `ref`.
/// Arrays hold reference_nodes(order).size() entries.
void shape_functions(int order, Vec2 ref, double* n, double* dn_dxi, double* dn_deta);

class FeSpace {
 public:
  FeSpace(const Mesh& mesh, int order);

  int order() const { return order_; }
  int nodes_per_element() const { return order_ == 1 ? 4 : 9; }
  std::size_t num_nodes() const { return positions_.size(); }
  std::size_t num_dofs() const { return 2 * positions_.size(); }

  const std::vector<int>& leaves() const { return leaves_; }
  std::size_t num_elements() const { return leaves_.size(); }
  /// Position of element id `e` in leaves(), or -1 for non-leaves.
  int leaf_index(int e) const { return leaf_index_[static_cast<std::size_t>(e)]; }
  /// Global node ids of the i-th leaf.
  const int* element_nodes(std::size_t i) const {
    return element_nodes_.data() + i * static_cast<std::size_t>(nodes_per_element());
  }

  const Vec2& node_position(int n) const { return positions_[static_cast<std::size_t>(n)]; }
  const VertexHome& node_home(int n) const { return homes_[static_cast<std::size_t>(n)]; }
  int node_solid(int n) const { return solids_[static_cast<std::size_t>(n)]; }
  /// Node ids lying on boundary edges with the given tag, ascending.
  std::vector<int> nodes_on_tag(int tag) const;

  /// Node-level hanging constraints (Q1 only; empty for Q2).
  const std::vector<HangingConstraint>& constraints() const { return constraints_; }

 private:
  int order_;
  std::vector<int> leaves_;
  std::vector<int> leaf_index_;
  std::vector<int> element_nodes_;
  std::vector<Vec2> positions_;
  std::vector<VertexHome> homes_;
  std::vector<int> solids_;
  std::vector<std::vector<int>> tag_nodes_;
  std::vector<HangingConstraint> constraints_;
};

/// Splits DOFs into conforming (solved for) and hanging (interpolated).
/// DOF 2n is the x displacement of node n, 2n+1 the y displacement.
struct DofMap {
  std::vector<int> full_to_conforming;  // -1 for hanging DOFs
  std::vector<int> conforming_to_full;

  std::size_t num_full() const { return full_to_conforming.size(); }
  std::size_t num_conforming() const { return conforming_to_full.size(); }
  bool is_hanging(int dof) const { return full_to_conforming[static_cast<std::size_t>(dof)] < 0; }
};

DofMap build_dofmap(const FeSpace& space);

}  // namespace camr
