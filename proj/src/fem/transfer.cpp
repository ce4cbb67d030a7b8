#include "camr/fem/transfer.hpp"

#include <cmath>

namespace camr {

Vec2 evaluate_displacement(const Mesh& mesh, const FeSpace& space, std::span<const double> u,
                           int root, Vec2 root_ref) {
  const int e = mesh.locate_leaf(root, root_ref);
  const int li = space.leaf_index(e);
  if (li < 0) throw InternalError("space does not match mesh leaves");
  return displacement_at(space, static_cast<std::size_t>(li), mesh.element(e).box.from_root(root_ref), u);
}

std::vector<double> interpolate(const Mesh& from_mesh, const FeSpace& from_space,
                                std::span<const double> u, const FeSpace& to_space) {
  std::vector<double> out(to_space.num_dofs(), 0.0);
  for (std::size_t n = 0; n < to_space.num_nodes(); ++n) {
    const VertexHome& h = to_space.node_home(static_cast<int>(n));
    if (h.root < 0 || static_cast<std::size_t>(h.root) >= from_mesh.num_roots())
      throw ConfigError("meshes do not share roots");
    const Vec2 v = evaluate_displacement(from_mesh, from_space, u, h.root, h.ref);
    out[2 * n] = v.x;
    out[2 * n + 1] = v.y;
  }
  return out;
}

namespace {

struct Accumulator {
  const Mesh& ma;
  const FeSpace& sa;
  std::span<const double> ua;
  const Mesh& mb;
  const FeSpace& sb;
  std::span<const double> ub;
  const MaterialTable& materials;
  const GaussRule& rule;
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;

  static double energy(const std::array<double, 9>& c, const Voigt& e) {
    return e[0] * (c[0] * e[0] + c[1] * e[1]) + e[1] * (c[3] * e[0] + c[4] * e[1]) + c[8] * e[2] * e[2];
  }

  // Both ea and eb are leaves; integrate over the smaller of the two boxes.
  void integrate(int ea, int eb) {
    const Element& a = ma.element(ea);
    const Element& b = mb.element(eb);
    const SubSquare& cell = a.level >= b.level ? a.box : b.box;
    const auto c = materials.of(a.solid).stiffness();
    const auto la = static_cast<std::size_t>(sa.leaf_index(ea));
    const auto lb = static_cast<std::size_t>(sb.leaf_index(eb));
    for (std::size_t j = 0; j < rule.points.size(); ++j)
      for (std::size_t i = 0; i < rule.points.size(); ++i) {
        const Vec2 r = cell.to_root({rule.points[i], rule.points[j]});
        const auto ka = kinematics(ma, sa, la, a.box.from_root(r));
        const auto kb = kinematics(mb, sb, lb, b.box.from_root(r));
        // Jacobian of the cell = root Jacobian scaled by (cell.size/2)^2.
        const double det = ka.det * (cell.size / a.box.size) * (cell.size / a.box.size);
        const double w = rule.weights[i] * rule.weights[j] * det;
        const Voigt sa_ = strain_at(sa, la, ka, ua);
        const Voigt sb_ = strain_at(sb, lb, kb, ub);
        const Voigt d{sa_[0] - sb_[0], sa_[1] - sb_[1], sa_[2] - sb_[2]};
        diff += w * energy(c, d);
        na += w * energy(c, sa_);
        nb += w * energy(c, sb_);
      }
  }

  void visit(int ea, int eb) {
    const Element& a = ma.element(ea);
    const Element& b = mb.element(eb);
    if (a.is_leaf() && b.is_leaf()) {
      integrate(ea, eb);
    } else if (!a.is_leaf() && !b.is_leaf()) {
      for (int k = 0; k < 4; ++k) visit(a.children[k], b.children[k]);
    } else if (a.is_leaf()) {
      for (int k = 0; k < 4; ++k) visit(ea, b.children[k]);
    } else {
      for (int k = 0; k < 4; ++k) visit(a.children[k], eb);
    }
  }
};

}  // namespace

EnergyComparison energy_difference(const Mesh& mesh_a, const FeSpace& space_a,
                                   std::span<const double> u_a, const Mesh& mesh_b,
                                   const FeSpace& space_b, std::span<const double> u_b,
                                   const MaterialTable& materials, int quadrature_points) {
  if (mesh_a.num_roots() != mesh_b.num_roots()) throw ConfigError("meshes do not share roots");
  for (std::size_t r = 0; r < mesh_a.num_roots(); ++r)
    for (int c = 0; c < 4; ++c)
      if (norm(mesh_a.vertex(mesh_a.element(static_cast<int>(r)).corners[c]) -
               mesh_b.vertex(mesh_b.element(static_cast<int>(r)).corners[c])) > 1e-12)
        throw ConfigError("meshes do not share roots");
  Accumulator acc{mesh_a, space_a, u_a, mesh_b, space_b, u_b, materials, gauss_legendre(quadrature_points)};
  for (std::size_t r = 0; r < mesh_a.num_roots(); ++r) acc.visit(static_cast<int>(r), static_cast<int>(r));
  return {std::sqrt(std::max(acc.diff, 0.0)), std::sqrt(acc.na), std::sqrt(acc.nb)};
}

}  // namespace camr
