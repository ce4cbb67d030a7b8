#include "camr/fem/space.hpp"

#include <algorithm>
#include <map>

namespace camr {

const std::vector<Vec2>& reference_nodes(int order) {
  static const std::vector<Vec2> q1{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  static const std::vector<Vec2> q2{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, -1},
                                    {1, 0},   {0, 1},  {-1, 0}, {0, 0}};
  if (order == 1) return q1;
  if (order == 2) return q2;
  throw ConfigError("displacement order must be 1 or 2");
}

namespace {

// 1D quadratic Lagrange on {-1, 0, 1} indexed by the node coordinate.
void quad1d(double t, double node, double& v, double& d) {
  if (node < -0.5) {
    v = 0.5 * t * (t - 1.0);
    d = t - 0.5;
  } else if (node > 0.5) {
    v = 0.5 * t * (t + 1.0);
    d = t + 0.5;
  } else {
    v = 1.0 - t * t;
    d = -2.0 * t;
  }
}

}  // namespace

void shape_functions(int order, Vec2 ref, double* n, double* dn_dxi, double* dn_deta) {
  const auto& nodes = reference_nodes(order);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double vx, dx, vy, dy;
    if (order == 1) {
      vx = 0.5 * (1.0 + nodes[i].x * ref.x);
      dx = 0.5 * nodes[i].x;
      vy = 0.5 * (1.0 + nodes[i].y * ref.y);
      dy = 0.5 * nodes[i].y;
    } else {
      quad1d(ref.x, nodes[i].x, vx, dx);
      quad1d(ref.y, nodes[i].y, vy, dy);
    }
    n[i] = vx * vy;
    dn_dxi[i] = dx * vy;
    dn_deta[i] = vx * dy;
  }
}

FeSpace::FeSpace(const Mesh& mesh, int order) : order_(order), tag_nodes_(4) {
  reference_nodes(order);
  leaves_ = mesh.leaves();
  leaf_index_.assign(mesh.num_elements(), -1);
  for (std::size_t i = 0; i < leaves_.size(); ++i) leaf_index_[static_cast<std::size_t>(leaves_[i])] = static_cast<int>(i);

  const std::size_t nv = mesh.num_vertices();
  positions_.resize(nv);
  homes_.resize(nv);
  solids_.assign(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    positions_[v] = mesh.vertex(static_cast<int>(v));
    homes_[v] = mesh.vertex_home(static_cast<int>(v));
  }

  const int npe = nodes_per_element();
  element_nodes_.resize(leaves_.size() * static_cast<std::size_t>(npe));
  constraints_ = mesh.hanging_constraints();
  if (order == 2 && !constraints_.empty())
    throw ConfigError("Q2 elements require a mesh without hanging nodes");

  std::map<std::uint64_t, int> edge_nodes;
  const auto& refs = reference_nodes(order);
  auto add_node = [&](int e, Vec2 ref) {
    const Element& el = mesh.element(e);
    positions_.push_back(mesh.geometry_map(e, ref));
    homes_.push_back({el.root, el.box.to_root(ref)});
    solids_.push_back(el.solid);
    return static_cast<int>(positions_.size() - 1);
  };
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    const int e = leaves_[i];
    const Element& el = mesh.element(e);
    int* nodes = element_nodes_.data() + i * static_cast<std::size_t>(npe);
    for (int c = 0; c < 4; ++c) {
      nodes[c] = el.corners[c];
      solids_[static_cast<std::size_t>(el.corners[c])] = el.solid;
    }
    if (order == 2) {
      for (int k = 0; k < 4; ++k) {
        const auto key = edge_key(el.corners[k], el.corners[(k + 1) % 4]);
        auto it = edge_nodes.find(key);
        if (it == edge_nodes.end()) it = edge_nodes.emplace(key, add_node(e, refs[4 + k])).first;
        nodes[4 + k] = it->second;
      }
      nodes[8] = add_node(e, refs[8]);
    }
  }

  for (const auto& be : mesh.boundary_edges()) {
    if (be.tag <= 0) continue;
    if (static_cast<std::size_t>(be.tag) >= tag_nodes_.size()) tag_nodes_.resize(static_cast<std::size_t>(be.tag) + 1);
    const Element& el = mesh.element(be.element);
    auto& list = tag_nodes_[static_cast<std::size_t>(be.tag)];
    list.push_back(el.corners[be.local_edge]);
    list.push_back(el.corners[(be.local_edge + 1) % 4]);
    if (order == 2) {
      const int li = leaf_index(be.element);
      list.push_back(element_nodes(static_cast<std::size_t>(li))[4 + be.local_edge]);
    }
  }
  for (auto& list : tag_nodes_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

std::vector<int> FeSpace::nodes_on_tag(int tag) const {
  if (tag <= 0 || static_cast<std::size_t>(tag) >= tag_nodes_.size()) return {};
  return tag_nodes_[static_cast<std::size_t>(tag)];
}

DofMap build_dofmap(const FeSpace& space) {
  DofMap map;
  map.full_to_conforming.assign(space.num_dofs(), 0);
  for (const auto& c : space.constraints()) {
    map.full_to_conforming[2 * static_cast<std::size_t>(c.slave)] = -1;
    map.full_to_conforming[2 * static_cast<std::size_t>(c.slave) + 1] = -1;
  }
  for (std::size_t d = 0; d < map.full_to_conforming.size(); ++d) {
    if (map.full_to_conforming[d] < 0) continue;
    map.full_to_conforming[d] = static_cast<int>(map.conforming_to_full.size());
    map.conforming_to_full.push_back(static_cast<int>(d));
  }
  return map;
}

}  // namespace camr
