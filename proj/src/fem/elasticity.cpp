#include "camr/fem/elasticity.hpp"

#include <string>

namespace camr {

void Material::validate() const {
  if (!(young_modulus > 0.0)) throw ConfigError("Young's modulus must be positive");
  if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5))
    throw ConfigError("Poisson ratio must lie in [0, 0.5)");
}

std::array<double, 9> Material::stiffness() const {
  const double e = young_modulus;
  const double nu = poisson_ratio;
  const double f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
  return {f * (1.0 - nu), f * nu, 0.0, f * nu, f * (1.0 - nu), 0.0, 0.0, 0.0, f * (0.5 - nu)};
}

Voigt Material::stress(const Voigt& s) const {
  const auto c = stiffness();
  return {c[0] * s[0] + c[1] * s[1], c[3] * s[0] + c[4] * s[1], c[8] * s[2]};
}

Voigt Material::strain(const Voigt& sig) const {
  // Plane strain compliance restricted to the in-plane components.
  const double e = young_modulus;
  const double nu = poisson_ratio;
  const double a = (1.0 + nu) / e;
  return {a * ((1.0 - nu) * sig[0] - nu * sig[1]), a * ((1.0 - nu) * sig[1] - nu * sig[0]),
          2.0 * a * sig[2]};
}

MaterialTable::MaterialTable(std::initializer_list<std::pair<const int, Material>> init) {
  for (const auto& [solid, m] : init) set(solid, m);
}

void MaterialTable::set(int solid, const Material& m) {
  m.validate();
  by_solid_[solid] = m;
}

const Material& MaterialTable::of(int solid) const {
  auto it = by_solid_.find(solid);
  if (it == by_solid_.end()) throw ConfigError("no material for solid " + std::to_string(solid));
  return it->second;
}

PointKinematics kinematics(const Mesh& mesh, const FeSpace& space, std::size_t leaf, Vec2 ref) {
  const int e = space.leaves()[leaf];
  const MapPoint mp = mesh.map(e, ref);
  PointKinematics k;
  k.det = mp.det();
  k.x = mp.x;
  if (k.det <= 0.0)
    throw GeometryError("non-positive Jacobian in element " + std::to_string(e));
  std::array<double, 9> dxi{}, deta{};
  shape_functions(space.order(), ref, k.n.data(), dxi.data(), deta.data());
  // Inverse Jacobian: [dxi/dx dxi/dy; deta/dx deta/dy].
  const double inv = 1.0 / k.det;
  const double xi_x = mp.deta.y * inv;
  const double xi_y = -mp.deta.x * inv;
  const double eta_x = -mp.dxi.y * inv;
  const double eta_y = mp.dxi.x * inv;
  for (int a = 0; a < space.nodes_per_element(); ++a) {
    k.dn_dx[a] = dxi[a] * xi_x + deta[a] * eta_x;
    k.dn_dy[a] = dxi[a] * xi_y + deta[a] * eta_y;
  }
  return k;
}

Voigt strain_at(const FeSpace& space, std::size_t leaf, const PointKinematics& k,
                std::span<const double> u) {
  const int* nodes = space.element_nodes(leaf);
  Voigt s{};
  for (int a = 0; a < space.nodes_per_element(); ++a) {
    const double ux = u[2 * static_cast<std::size_t>(nodes[a])];
    const double uy = u[2 * static_cast<std::size_t>(nodes[a]) + 1];
    s[0] += k.dn_dx[a] * ux;
    s[1] += k.dn_dy[a] * uy;
    s[2] += k.dn_dy[a] * ux + k.dn_dx[a] * uy;
  }
  return s;
}

Vec2 displacement_at(const FeSpace& space, std::size_t leaf, Vec2 ref, std::span<const double> u) {
  std::array<double, 9> n{}, dx{}, dy{};
  shape_functions(space.order(), ref, n.data(), dx.data(), dy.data());
  const int* nodes = space.element_nodes(leaf);
  Vec2 out;
  for (int a = 0; a < space.nodes_per_element(); ++a) {
    out.x += n[a] * u[2 * static_cast<std::size_t>(nodes[a])];
    out.y += n[a] * u[2 * static_cast<std::size_t>(nodes[a]) + 1];
  }
  return out;
}

AssembledSystem assemble_stiffness(const Mesh& mesh, const FeSpace& space,
                                   const MaterialTable& materials, const AssemblyOptions& options) {
  const int npe = space.nodes_per_element();
  const int ndof = 2 * npe;
  const int nq = options.quadrature_points > 0 ? options.quadrature_points : space.order() + 1;
  const auto& rule = gauss_legendre(nq);

  TripletBuilder builder(space.num_dofs(), space.num_dofs());
  builder.reserve(space.num_elements() * static_cast<std::size_t>(ndof * ndof));
  std::vector<double> load(space.num_dofs(), 0.0);
  std::vector<double> ke(static_cast<std::size_t>(ndof * ndof));

  for (std::size_t i = 0; i < space.num_elements(); ++i) {
    const Element& el = mesh.element(space.leaves()[i]);
    const auto c = materials.of(el.solid).stiffness();
    std::fill(ke.begin(), ke.end(), 0.0);
    for (std::size_t qy = 0; qy < rule.points.size(); ++qy)
      for (std::size_t qx = 0; qx < rule.points.size(); ++qx) {
        const auto k = kinematics(mesh, space, i, {rule.points[qx], rule.points[qy]});
        const double w = rule.weights[qx] * rule.weights[qy] * k.det;
        for (int a = 0; a < npe; ++a) {
          const double ax = k.dn_dx[a], ay = k.dn_dy[a];
          // Rows of C B for node a, x and y columns.
          const double cb_xx[3] = {c[0] * ax, c[3] * ax, c[8] * ay};
          const double cb_xy[3] = {c[1] * ay, c[4] * ay, c[8] * ax};
          for (int b = 0; b < npe; ++b) {
            const double bx = k.dn_dx[b], by = k.dn_dy[b];
            // B_b^T (C B_a): B_b columns are (bx,0,by) and (0,by,bx).
            ke[static_cast<std::size_t>((2 * b) * ndof + 2 * a)] += w * (bx * cb_xx[0] + by * cb_xx[2]);
            ke[static_cast<std::size_t>((2 * b + 1) * ndof + 2 * a)] += w * (by * cb_xx[1] + bx * cb_xx[2]);
            ke[static_cast<std::size_t>((2 * b) * ndof + 2 * a + 1)] += w * (bx * cb_xy[0] + by * cb_xy[2]);
            ke[static_cast<std::size_t>((2 * b + 1) * ndof + 2 * a + 1)] += w * (by * cb_xy[1] + bx * cb_xy[2]);
          }
        }
      }
    const int* nodes = space.element_nodes(i);
    for (int r = 0; r < ndof; ++r)
      for (int s = 0; s < ndof; ++s)
        builder.add(2 * nodes[r / 2] + r % 2, 2 * nodes[s / 2] + s % 2,
                    ke[static_cast<std::size_t>(r * ndof + s)]);
  }

  if (!options.tractions.empty()) {
    static const std::array<Vec2, 4> start{Vec2{-1, -1}, Vec2{1, -1}, Vec2{1, 1}, Vec2{-1, 1}};
    static const std::array<Vec2, 4> dir{Vec2{1, 0}, Vec2{0, 1}, Vec2{-1, 0}, Vec2{0, -1}};
    const auto& edge_rule = gauss_legendre(std::max(nq, mesh.geom_order() + 1));
    std::array<double, 9> n{}, dx{}, dy{};
    for (const auto& be : mesh.boundary_edges())
      for (const auto& t : options.tractions) {
        if (t.tag != be.tag) continue;
        const int li = space.leaf_index(be.element);
        const int* nodes = space.element_nodes(static_cast<std::size_t>(li));
        for (std::size_t g = 0; g < edge_rule.points.size(); ++g) {
          const double s = 0.5 * (edge_rule.points[g] + 1.0);
          const Vec2 ref = start[static_cast<std::size_t>(be.local_edge)] +
                           dir[static_cast<std::size_t>(be.local_edge)] * (2.0 * s);
          const MapPoint mp = mesh.map(be.element, ref);
          const Vec2 tangent = (be.local_edge % 2 == 0) ? mp.dxi : mp.deta;
          const double jac = norm(tangent);
          shape_functions(space.order(), ref, n.data(), dx.data(), dy.data());
          for (int a = 0; a < npe; ++a) {
            const double w = edge_rule.weights[g] * jac * n[a];
            load[2 * static_cast<std::size_t>(nodes[a])] += w * t.value.x;
            load[2 * static_cast<std::size_t>(nodes[a]) + 1] += w * t.value.y;
          }
        }
      }
  }
  return {builder.build(), std::move(load)};
}

}  // namespace camr
