#include "camr/mesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace camr {

namespace {

constexpr std::array<Vec2, 4> kCornerRef{{{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}};
constexpr std::array<Vec2, 4> kEdgeMidRef{{{0.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}}};

}  // namespace

Mesh::Mesh(int geom_order) : q_(geom_order), basis_(geom_order < 1 ? 1 : geom_order) {
  if (geom_order < 1) throw ConfigError("geometry order must be >= 1");
}

int Mesh::add_vertex(Vec2 position) {
  vertices_.push_back(position);
  homes_.push_back({});
  return static_cast<int>(vertices_.size()) - 1;
}

int Mesh::add_root(int solid, std::array<int, 4> corners, std::vector<Vec2> geom_nodes,
                   std::array<int, 4> edge_tags) {
  if (num_roots_ != elements_.size())
    throw InternalError("roots must be added before any refinement");
  const auto n = static_cast<std::size_t>((q_ + 1) * (q_ + 1));
  if (geom_nodes.size() != n) throw GeometryError("root needs (q+1)^2 geometric nodes");
  for (int c : corners)
    if (c < 0 || static_cast<std::size_t>(c) >= vertices_.size())
      throw GeometryError("root corner references an unknown vertex");
  Element el;
  el.corners = corners;
  el.edge_tags = edge_tags;
  el.root = static_cast<int>(elements_.size());
  el.solid = solid;
  elements_.push_back(el);
  root_geom_.insert(root_geom_.end(), geom_nodes.begin(), geom_nodes.end());
  ++num_roots_;
  for (int k = 0; k < 4; ++k) {
    auto& home = homes_[static_cast<std::size_t>(corners[k])];
    if (home.root < 0) home = {el.root, kCornerRef[k]};
  }
  return el.root;
}

std::vector<int> Mesh::leaves() const {
  std::vector<int> out;
  out.reserve(elements_.size());
  for (std::size_t e = 0; e < elements_.size(); ++e)
    if (elements_[e].is_leaf()) out.push_back(static_cast<int>(e));
  return out;
}

std::size_t Mesh::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(elements_.begin(), elements_.end(), [](const Element& e) { return e.is_leaf(); }));
}

int Mesh::max_level() const {
  int lvl = 0;
  for (const auto& e : elements_)
    if (e.is_leaf()) lvl = std::max(lvl, e.level);
  return lvl;
}

std::vector<BoundaryEdge> Mesh::boundary_edges() const {
  std::vector<BoundaryEdge> out;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& el = elements_[e];
    if (!el.is_leaf()) continue;
    for (int k = 0; k < 4; ++k)
      if (el.edge_tags[k] != tags::kNone) out.push_back({static_cast<int>(e), k, el.edge_tags[k]});
  }
  return out;
}

MapPoint Mesh::map_root(int root, Vec2 r) const {
  const int n = q_ + 1;
  double px[41], dx[41], py[41], dy[41];
  basis_.eval(r.x, {px, static_cast<std::size_t>(n)}, {dx, static_cast<std::size_t>(n)});
  basis_.eval(r.y, {py, static_cast<std::size_t>(n)}, {dy, static_cast<std::size_t>(n)});
  const Vec2* g = root_geom_.data() + static_cast<std::size_t>(root) * n * n;
  MapPoint out;
  for (int j = 0; j < n; ++j) {
    Vec2 row_v, row_d;
    for (int i = 0; i < n; ++i) {
      const Vec2& p = g[i + n * j];
      row_v.x += px[i] * p.x;
      row_v.y += px[i] * p.y;
      row_d.x += dx[i] * p.x;
      row_d.y += dx[i] * p.y;
    }
    out.x.x += py[j] * row_v.x;
    out.x.y += py[j] * row_v.y;
    out.dxi.x += py[j] * row_d.x;
    out.dxi.y += py[j] * row_d.y;
    out.deta.x += dy[j] * row_v.x;
    out.deta.y += dy[j] * row_v.y;
  }
  return out;
}

MapPoint Mesh::map(int e, Vec2 ref) const {
  const auto& el = element(e);
  MapPoint mp = map_root(el.root, el.box.to_root(ref));
  const double s = 0.5 * el.box.size;
  mp.dxi = mp.dxi * s;
  mp.deta = mp.deta * s;
  return mp;
}

std::vector<Vec2> Mesh::geometry_nodes(int e) const {
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>((q_ + 1) * (q_ + 1)));
  for (int j = 0; j <= q_; ++j)
    for (int i = 0; i <= q_; ++i) out.push_back(geometry_map(e, {basis_.node(i), basis_.node(j)}));
  return out;
}

double Mesh::element_measure(int e) const {
  const auto& rule = gauss_legendre(std::max(q_ + 1, 2));
  double area = 0.0;
  for (std::size_t j = 0; j < rule.points.size(); ++j)
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      const double det = map(e, {rule.points[i], rule.points[j]}).det();
      if (det <= 0.0) {
        std::ostringstream msg;
        msg << "non-positive Jacobian in element " << e;
        throw GeometryError(msg.str());
      }
      area += det * rule.weights[i] * rule.weights[j];
    }
  return area;
}

double Mesh::total_leaf_measure() const {
  double total = 0.0;
  for (int e : leaves()) total += element_measure(e);
  return total;
}

double Mesh::element_diameter(int e) const {
  const auto& c = element(e).corners;
  return std::max(norm(vertex(c[2]) - vertex(c[0])), norm(vertex(c[3]) - vertex(c[1])));
}

int Mesh::locate_leaf(int root, Vec2 r) const {
  int e = root;
  while (!element(e).is_leaf()) {
    const auto& el = element(e);
    const double half = 0.5 * el.box.size;
    const bool right = r.x >= el.box.x0 + half;
    const bool up = r.y >= el.box.y0 + half;
    const int child = up ? (right ? 2 : 3) : (right ? 1 : 0);
    e = el.children[child];
  }
  return e;
}

int Mesh::edge_midpoint(int a, int b) const {
  auto it = edge_mid_.find(edge_key(a, b));
  return it == edge_mid_.end() ? -1 : it->second;
}

Mesh::EdgeOwners Mesh::leaf_edge_owners() const {
  EdgeOwners owners;
  owners.reserve(elements_.size() * 2);
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& el = elements_[e];
    if (!el.is_leaf()) continue;
    for (int k = 0; k < 4; ++k)
      owners[edge_key(el.corners[k], el.corners[(k + 1) % 4])].push_back({static_cast<int>(e), k});
  }
  return owners;
}

int Mesh::midpoint_vertex(int parent, int local_edge) {
  const auto& el = elements_[static_cast<std::size_t>(parent)];
  const int a = el.corners[local_edge];
  const int b = el.corners[(local_edge + 1) % 4];
  const auto key = edge_key(a, b);
  if (auto it = edge_mid_.find(key); it != edge_mid_.end()) return it->second;
  const Vec2 ref = kEdgeMidRef[local_edge];
  const int m = add_vertex(geometry_map(parent, ref));
  homes_[static_cast<std::size_t>(m)] = {el.root, el.box.to_root(ref)};
  edge_mid_.emplace(key, m);
  edge_parent_.emplace(edge_key(a, m), key);
  edge_parent_.emplace(edge_key(m, b), key);
  return m;
}

void Mesh::split(int e) {
  std::array<int, 4> mid{};
  for (int k = 0; k < 4; ++k) mid[k] = midpoint_vertex(e, k);
  const Element parent = elements_[static_cast<std::size_t>(e)];
  const int center = add_vertex(geometry_map(e, {0.0, 0.0}));
  homes_[static_cast<std::size_t>(center)] = {parent.root, parent.box.to_root({0.0, 0.0})};

  const auto& v = parent.corners;
  const std::array<std::array<int, 4>, 4> child_corners{{
      {v[0], mid[0], center, mid[3]},
      {mid[0], v[1], mid[1], center},
      {center, mid[1], v[2], mid[2]},
      {mid[3], center, mid[2], v[3]},
  }};
  const auto& t = parent.edge_tags;
  const std::array<std::array<int, 4>, 4> child_tags{{
      {t[0], 0, 0, t[3]},
      {t[0], t[1], 0, 0},
      {0, t[1], t[2], 0},
      {0, 0, t[2], t[3]},
  }};
  constexpr std::array<std::array<int, 2>, 4> offset{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const double half = 0.5 * parent.box.size;
  std::array<int, 4> ids{};
  for (int c = 0; c < 4; ++c) {
    Element child;
    child.corners = child_corners[c];
    child.edge_tags = child_tags[c];
    child.level = parent.level + 1;
    child.parent = e;
    child.root = parent.root;
    child.solid = parent.solid;
    child.box = {parent.box.x0 + offset[c][0] * half, parent.box.y0 + offset[c][1] * half, half};
    elements_.push_back(child);
    ids[c] = static_cast<int>(elements_.size()) - 1;
  }
  elements_[static_cast<std::size_t>(e)].children = ids;
}

std::set<int> Mesh::two_to_one_closure(const std::set<int>& marked) const {
  for (int e : marked) {
    if (e < 0 || static_cast<std::size_t>(e) >= elements_.size())
      throw ConfigError("marked element id out of range");
    if (!element(e).is_leaf()) throw ConfigError("only leaf elements can be marked for refinement");
  }
  const auto owners = leaf_edge_owners();
  std::set<int> closed = marked;
  std::set<int> work = marked;
  while (!work.empty()) {
    const int e = *work.begin();
    work.erase(work.begin());
    const auto& el = element(e);
    for (int k = 0; k < 4; ++k) {
      const auto pit = edge_parent_.find(edge_key(el.corners[k], el.corners[(k + 1) % 4]));
      if (pit == edge_parent_.end()) continue;
      const auto oit = owners.find(pit->second);
      if (oit == owners.end()) continue;
      for (const auto& owner : oit->second) {
        if (closed.insert(owner.element).second) work.insert(owner.element);
      }
    }
  }
  return closed;
}

std::vector<int> Mesh::refine_in_place(const std::set<int>& marked) {
  const auto closed = two_to_one_closure(marked);
  std::vector<int> split_ids(closed.begin(), closed.end());
  for (int e : split_ids) split(e);
  return split_ids;
}

std::vector<HangingConstraint> Mesh::hanging_constraints() const {
  const auto owners = leaf_edge_owners();
  std::map<int, std::map<int, double>> raw;
  for (const auto& [key, list] : owners) {
    if (list.size() != 1) continue;
    const auto mit = edge_mid_.find(key);
    if (mit == edge_mid_.end()) continue;
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    raw[mit->second] = {{a, 0.5}, {b, 0.5}};
  }
  // Fixed-point substitution so that every master is a conforming vertex.
  for (int pass = 0;; ++pass) {
    if (pass > 64) throw InternalError("hanging-node constraint chain does not terminate");
    bool changed = false;
    for (auto& [slave, masters] : raw) {
      std::map<int, double> next;
      for (const auto& [m, w] : masters) {
        auto sub = raw.find(m);
        if (sub == raw.end()) {
          next[m] += w;
        } else {
          changed = true;
          for (const auto& [m2, w2] : sub->second) next[m2] += w * w2;
        }
      }
      masters = std::move(next);
    }
    if (!changed) break;
  }
  std::vector<HangingConstraint> out;
  out.reserve(raw.size());
  for (const auto& [slave, masters] : raw) {
    HangingConstraint c;
    c.slave = slave;
    for (const auto& [m, w] : masters) {
      c.masters.push_back(m);
      c.weights.push_back(w);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::string> Mesh::two_to_one_violations() const {
  std::vector<std::string> out;
  const auto owners = leaf_edge_owners();
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& el = elements_[e];
    if (!el.is_leaf()) continue;
    for (int k = 0; k < 4; ++k) {
      // Walk up the chain of edges this leaf edge was split from; a leaf owning an
      // ancestor edge two or more generations up is at least two levels coarser.
      auto key = edge_key(el.corners[k], el.corners[(k + 1) % 4]);
      int depth = 0;
      for (auto pit = edge_parent_.find(key); pit != edge_parent_.end();
           pit = edge_parent_.find(key)) {
        key = pit->second;
        ++depth;
        const auto oit = owners.find(key);
        if (oit == owners.end()) continue;
        for (const auto& owner : oit->second) {
          if (owner.element == static_cast<int>(e)) continue;
          if (el.level - element(owner.element).level > 1 || depth > 1) {
            std::ostringstream msg;
            msg << "2:1 rule broken between leaves " << e << " (level " << el.level << ") and "
                << owner.element << " (level " << element(owner.element).level << ")";
            out.push_back(msg.str());
          }
        }
      }
    }
  }
  return out;
}

std::vector<std::string> Mesh::check_invariants(double measure_reference) const {
  std::vector<std::string> out;
  const auto& rule = gauss_legendre(std::max(q_ + 1, 2));
  std::vector<int> vertex_solid(vertices_.size(), 0);
  double total = 0.0;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& el = elements_[e];
    if (!el.is_leaf()) {
      for (int c : el.children)
        if (c < 0 || element(c).level != el.level + 1 || element(c).parent != static_cast<int>(e))
          out.push_back("inconsistent parent/child links at element " + std::to_string(e));
      continue;
    }
    const bool positive = std::all_of(rule.points.begin(), rule.points.end(), [&](double y) {
      return std::all_of(rule.points.begin(), rule.points.end(),
                         [&](double x) { return map(static_cast<int>(e), {x, y}).det() > 0.0; });
    });
    if (positive) total += element_measure(static_cast<int>(e));
    else out.push_back("non-positive Jacobian in leaf " + std::to_string(e));
    for (int v : el.corners) {
      int& s = vertex_solid[static_cast<std::size_t>(v)];
      if (s == 0) s = el.solid;
      else if (s != el.solid) out.push_back("vertex " + std::to_string(v) + " shared by two solids");
    }
  }
  if (measure_reference < 0.0) {
    measure_reference = 0.0;
    for (std::size_t r = 0; r < num_roots_; ++r) measure_reference += element_measure(static_cast<int>(r));
  }
  if (std::abs(total - measure_reference) > 1e-10 * std::abs(measure_reference))
    out.push_back("leaf measures do not tile the domain");
  auto v21 = two_to_one_violations();
  out.insert(out.end(), v21.begin(), v21.end());
  return out;
}

Mesh refine(const Mesh& mesh, const std::set<int>& marked) {
  Mesh out = mesh;
  out.refine_in_place(marked);
  return out;
}

Mesh refine_uniformly(const Mesh& mesh, int levels) {
  Mesh out = mesh;
  for (int l = 0; l < levels; ++l) {
    const auto leaves = out.leaves();
    out.refine_in_place(std::set<int>(leaves.begin(), leaves.end()));
  }
  return out;
}

}  // namespace camr
