#include "camr/mesh/generators.hpp"

#include <cmath>
#include <numbers>

namespace camr {

MeshBuilder::MeshBuilder(int geom_order, double length_scale)
    : mesh_(geom_order), tol_(1e-9 * length_scale) {}

int MeshBuilder::find_or_add_vertex(int solid, Vec2 p) {
  const auto ix = static_cast<long long>(std::llround(p.x / tol_));
  const auto iy = static_cast<long long>(std::llround(p.y / tol_));
  for (long long dx = -1; dx <= 1; ++dx)
    for (long long dy = -1; dy <= 1; ++dy)
      if (auto it = lookup_.find({solid, ix + dx, iy + dy}); it != lookup_.end()) return it->second;
  const int v = mesh_.add_vertex(p);
  lookup_.emplace(std::tuple{solid, ix, iy}, v);
  return v;
}

void MeshBuilder::add_block(int solid, int nu, int nv, const BlockMap& map,
                            std::array<int, 4> side_tags, bool reverse_u) {
  const int q = mesh_.geom_order();
  const long long lat_u = static_cast<long long>(nu) * q;
  const long long lat_v = static_cast<long long>(nv) * q;
  // Lattice indices keep mirrored blocks bit-identical to their originals.
  auto point = [&](long long ku, long long kv) {
    return map(static_cast<double>(ku) / static_cast<double>(lat_u),
               static_cast<double>(kv) / static_cast<double>(lat_v));
  };
  auto lattice_u = [&](int iu, int a) -> long long {
    return reverse_u ? lat_u - (static_cast<long long>(iu) * q + a)
                     : static_cast<long long>(iu) * q + a;
  };
  const int tag_left = reverse_u ? side_tags[1] : side_tags[3];
  const int tag_right = reverse_u ? side_tags[3] : side_tags[1];
  for (int iv = 0; iv < nv; ++iv) {
    for (int iu = 0; iu < nu; ++iu) {
      std::vector<Vec2> geom;
      geom.reserve(static_cast<std::size_t>((q + 1) * (q + 1)));
      for (int b = 0; b <= q; ++b)
        for (int a = 0; a <= q; ++a)
          geom.push_back(point(lattice_u(iu, a), static_cast<long long>(iv) * q + b));
      const int n = q + 1;
      std::array<int, 4> corners{
          find_or_add_vertex(solid, geom[0]),
          find_or_add_vertex(solid, geom[static_cast<std::size_t>(q)]),
          find_or_add_vertex(solid, geom[static_cast<std::size_t>(q + n * q)]),
          find_or_add_vertex(solid, geom[static_cast<std::size_t>(n * q)]),
      };
      std::array<int, 4> edge_tags{
          iv == 0 ? side_tags[0] : tags::kNone,
          iu == nu - 1 ? tag_right : tags::kNone,
          iv == nv - 1 ? side_tags[2] : tags::kNone,
          iu == 0 ? tag_left : tags::kNone,
      };
      mesh_.add_root(solid, corners, std::move(geom), edge_tags);
    }
  }
}

Mesh MeshBuilder::build() {
  const int q = mesh_.geom_order();
  const auto& rule = gauss_legendre(std::max(q + 1, 2));
  for (std::size_t e = 0; e < mesh_.num_elements(); ++e)
    for (double y : rule.points)
      for (double x : rule.points)
        if (mesh_.map(static_cast<int>(e), {x, y}).det() <= 0.0)
          throw GeometryError("generated element " + std::to_string(e) +
                              " has a non-positive Jacobian");
  return mesh_;
}

Mesh generate_half_disk_pair(double radius, double gap, int n0, int geom_order) {
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (gap < 0.0) throw ConfigError("gap must be non-negative");
  if (n0 < 2) throw ConfigError("n0 must be at least 2");
  if (geom_order < 1) throw ConfigError("geometry order must be >= 1");

  const double R = radius;
  const double s = 0.5 * R;
  const double pi = std::numbers::pi;
  auto arc = [R](double theta) { return Vec2{R * std::cos(theta), R * std::sin(theta)}; };
  auto lerp = [](Vec2 a, Vec2 b, double t) { return a * (1.0 - t) + b * t; };

  // Local frame: flat side on y = 0, arc above.
  const MeshBuilder::BlockMap inner = [s](double u, double v) {
    return Vec2{-s + 2.0 * s * u, s * v};
  };
  const MeshBuilder::BlockMap right = [=](double u, double v) {
    return lerp(Vec2{s, s * v}, arc(0.25 * pi * v), u);
  };
  const MeshBuilder::BlockMap top = [=](double u, double v) {
    return lerp(Vec2{-s + 2.0 * s * u, s}, arc(0.75 * pi - 0.5 * pi * u), v);
  };
  const MeshBuilder::BlockMap left = [=](double u, double v) {
    return lerp(Vec2{-s, s * u}, arc(pi - 0.25 * pi * u), v);
  };

  const HalfDiskLayout layout{radius, gap};
  MeshBuilder builder(geom_order, R);
  for (int solid : {1, 2}) {
    const bool upper = solid == 2;
    const double sy = upper ? -1.0 : 1.0;
    const double ty = upper ? layout.upper_flat_y() : layout.lower_flat_y();
    const int contact = upper ? tags::kContact2 : tags::kContact1;
    auto place = [sy, ty](const MeshBuilder::BlockMap& m) -> MeshBuilder::BlockMap {
      return [m, sy, ty](double u, double v) {
        const Vec2 p = m(u, v);
        return Vec2{p.x, sy * p.y + ty};
      };
    };
    using namespace tags;
    builder.add_block(solid, 2 * n0, n0, place(inner), {kDirichlet, kNone, kNone, kNone}, upper);
    builder.add_block(solid, n0, n0, place(right), {kDirichlet, contact, kNone, kNone}, upper);
    builder.add_block(solid, 2 * n0, n0, place(top), {kNone, kNone, contact, kNone}, upper);
    builder.add_block(solid, n0, n0, place(left), {kNone, kNone, contact, kDirichlet}, upper);
  }
  return builder.build();
}

Mesh make_rectangle(int nx, int ny, Vec2 origin, double width, double height, int geom_order,
                    std::array<int, 4> side_tags, int solid) {
  if (nx < 1 || ny < 1 || !(width > 0.0) || !(height > 0.0))
    throw ConfigError("invalid rectangle parameters");
  MeshBuilder builder(geom_order, std::max(width, height));
  builder.add_block(
      solid, nx, ny,
      [=](double u, double v) { return Vec2{origin.x + width * u, origin.y + height * v}; },
      side_tags);
  return builder.build();
}

Mesh make_stacked_blocks(int nx, int ny, double width, double height, double gap, int geom_order) {
  if (nx < 1 || ny < 1 || !(width > 0.0) || !(height > 0.0) || gap < 0.0)
    throw ConfigError("invalid stacked block parameters");
  using namespace tags;
  MeshBuilder builder(geom_order, std::max(width, height));
  const double half = 0.5 * gap;
  builder.add_block(
      1, nx, ny, [=](double u, double v) { return Vec2{width * u, -half - height + height * v}; },
      {kDirichlet, kNone, kContact1, kNone});
  builder.add_block(
      2, nx, ny, [=](double u, double v) { return Vec2{width * u, half + height * v}; },
      {kContact2, kNone, kDirichlet, kNone});
  return builder.build();
}

}  // namespace camr
