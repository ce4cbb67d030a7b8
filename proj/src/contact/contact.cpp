#include "camr/contact/contact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace camr {

int ContactPairing::partner(int element) const {
  auto it = partner_of.find(element);
  return it == partner_of.end() ? -1 : it->second;
}

namespace {

Vec2 transverse(Vec2 n) { return {n.y, -n.x}; }

}  // namespace

ContactPairing pair_nodes(const Mesh& mesh, const FeSpace& space, int tag1, int tag2, Vec2 normal,
                          double tolerance) {
  const double nn = norm(normal);
  if (!(nn > 0.0)) throw ConfigError("contact normal must be non-zero");
  const Vec2 n = normal * (1.0 / nn);
  const Vec2 t = transverse(n);
  const auto nodes1 = space.nodes_on_tag(tag1);
  const auto nodes2 = space.nodes_on_tag(tag2);
  if (nodes1.empty() || nodes2.empty()) throw PairingError("contact tag selects no nodes");
  if (nodes1.size() != nodes2.size()) {
    std::ostringstream msg;
    msg << "contact interfaces do not match: " << nodes1.size() << " vs " << nodes2.size() << " nodes";
    throw PairingError(msg.str());
  }

  // Solid-2 nodes sorted by transverse coordinate for nearest lookup.
  std::vector<std::pair<double, int>> sorted2;
  for (int v : nodes2) sorted2.emplace_back(dot(space.node_position(v), t), v);
  std::sort(sorted2.begin(), sorted2.end());
  std::vector<std::pair<double, int>> sorted1;
  for (int v : nodes1) sorted1.emplace_back(dot(space.node_position(v), t), v);
  std::sort(sorted1.begin(), sorted1.end());

  double scale = 0.0;
  for (const auto& [c, v] : sorted1) scale = std::max(scale, norm(space.node_position(v)));
  const double tol = tolerance * std::max(scale, 1.0);

  ContactPairing out;
  out.normal = n;
  std::set<int> used;
  for (const auto& [c1, v1] : sorted1) {
    auto it = std::lower_bound(sorted2.begin(), sorted2.end(), std::pair{c1, -1});
    int best = -1;
    double best_off = INFINITY;
    for (auto cand : {it, it == sorted2.begin() ? it : it - 1})
      if (cand != sorted2.end() && std::abs(cand->first - c1) < best_off) {
        best_off = std::abs(cand->first - c1);
        best = cand->second;
      }
    if (best < 0 || best_off > tol) {
      std::ostringstream msg;
      msg << "node " << v1 << " has no partner within tolerance (offset " << best_off << ")";
      throw PairingError(msg.str());
    }
    if (!used.insert(best).second) throw PairingError("contact pairing is not a bijection");
    out.pairs.emplace_back(v1, best);
    out.gaps.push_back(dot(space.node_position(best) - space.node_position(v1), n));
  }

  TripletBuilder b(out.pairs.size(), space.num_dofs());
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    const auto [a, c] = out.pairs[i];
    const int row = static_cast<int>(i);
    b.add(row, 2 * a, n.x);
    b.add(row, 2 * a + 1, n.y);
    b.add(row, 2 * c, -n.x);
    b.add(row, 2 * c + 1, -n.y);
  }
  out.b = b.build();

  // Elements are paired when their contact edges join paired nodes.
  std::map<int, int> node_partner;
  for (const auto& [a, c] : out.pairs) node_partner[a] = c;
  std::unordered_map<std::uint64_t, int> edges2;
  std::vector<std::pair<int, std::uint64_t>> edges1;
  for (const auto& be : mesh.boundary_edges()) {
    const Element& el = mesh.element(be.element);
    const int a = el.corners[be.local_edge];
    const int c = el.corners[(be.local_edge + 1) % 4];
    if (be.tag == tag2) edges2[edge_key(a, c)] = be.element;
    if (be.tag == tag1) {
      auto pa = node_partner.find(a), pc = node_partner.find(c);
      if (pa == node_partner.end() || pc == node_partner.end()) throw PairingError("unpaired contact edge");
      edges1.emplace_back(be.element, edge_key(pa->second, pc->second));
    }
  }
  if (edges1.size() != edges2.size()) throw PairingError("contact element counts differ");
  for (const auto& [e1, key] : edges1) {
    auto it = edges2.find(key);
    if (it == edges2.end()) throw PairingError("contact element has no paired element");
    out.element_pairs.emplace_back(e1, it->second);
    out.partner_of[e1] = it->second;
    out.partner_of[it->second] = e1;
  }
  std::sort(out.element_pairs.begin(), out.element_pairs.end());
  return out;
}

ActiveSet active_set(const SparseMatrix& b, std::span<const double> gaps, std::span<const double> u) {
  if (gaps.size() != b.rows()) throw MatrixError("gap vector size mismatch");
  const auto bu = b * u;
  ActiveSet a;
  for (std::size_t i = 0; i < bu.size(); ++i)
    if (bu[i] >= gaps[i]) a.push_back(static_cast<int>(i));
  return a;
}

ProjectedContact restrict_and_project(const SparseMatrix& b, std::span<const double> gaps,
                                      const ActiveSet& active, const SparseMatrix& p) {
  ProjectedContact out;
  out.b_hat = multiply(b.select_rows(active), p);
  out.d_hat.reserve(active.size());
  for (int i : active) out.d_hat.push_back(gaps[static_cast<std::size_t>(i)]);
  return out;
}

LinearSystem form_penalized(const LinearSystem& elastic, const ProjectedContact& contact, double k_n) {
  if (!(k_n > 0.0)) throw ConfigError("penalty coefficient must be positive");
  const SparseMatrix bt = contact.b_hat.transpose();
  LinearSystem out{add(elastic.matrix, multiply(bt, contact.b_hat), 1.0, k_n), elastic.rhs};
  const auto btd = contact.b_hat.multiply_transpose(contact.d_hat);
  for (std::size_t i = 0; i < out.rhs.size(); ++i) out.rhs[i] += k_n * btd[i];
  return out;
}

double interpenetration(const SparseMatrix& b, std::span<const double> gaps, std::span<const double> u) {
  const auto bu = b * u;
  double worst = 0.0;
  for (std::size_t i = 0; i < bu.size(); ++i) worst = std::max(worst, bu[i] - gaps[i]);
  return worst;
}

ContactResult solve_contact(const ContactProblem& problem, const PenaltyConfig& config,
                            std::span<const double> initial_guess) {
  if (problem.pairing == nullptr) throw ConfigError("contact problem without pairing");
  if (!(config.k_n > 0.0)) throw ConfigError("penalty coefficient must be positive");
  if (config.l_max < 1) throw ConfigError("l_max must be at least 1");
  const ContactPairing& pairing = *problem.pairing;
  const ReducedSystem base = apply_dirichlet(problem.elastic, problem.dirichlet);

  ContactResult out;
  std::vector<double> x = initial_guess.empty() ? std::vector<double>(base.free_dofs.size(), 0.0)
                                                : base.gather(initial_guess);
  ActiveSet current = config.initial_active;
  std::vector<ActiveSet> seen;
  for (int l = 0; l < config.l_max; ++l) {
    const ProjectedContact pc = restrict_and_project(pairing.b, pairing.gaps, current, problem.prolongation);
    const SparseMatrix kc = multiply(pc.b_hat.transpose(), pc.b_hat);
    const LinearSystem contact_part = reduce_like(base, kc);
    const auto btd = pc.b_hat.multiply_transpose(pc.d_hat);
    SparseMatrix a = add(base.matrix, contact_part.matrix, 1.0, config.k_n);
    std::vector<double> rhs = base.rhs;
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] += config.k_n * (btd[static_cast<std::size_t>(base.free_dofs[i])] + contact_part.rhs[i]);

    const PcgResult sol = pcg_solve(a, rhs, x, config.pcg);
    x = sol.x;
    out.pcg_iterations += sol.iterations;
    out.u_conforming = base.scatter(x);
    out.u_full = problem.prolongation * std::span<const double>(out.u_conforming);

    ContactSweep sweep{current.size(), sol.iterations, false};
    ActiveSet next = active_set(pairing.b, pairing.gaps, out.u_full);
    if (next == current) {
      out.trace.push_back(sweep);
      out.active = current;
      out.converged = true;
      return out;
    }
    seen.push_back(current);
    if (std::find(seen.begin(), seen.end(), next) != seen.end()) {
      ActiveSet merged;
      std::set_union(next.begin(), next.end(), current.begin(), current.end(), std::back_inserter(merged));
      next = std::move(merged);
      sweep.anti_cycling = true;
    }
    out.trace.push_back(sweep);
    current = std::move(next);
  }
  out.active = current;
  out.converged = false;
  return out;
}

std::vector<PressureSample> contact_pressure_profile(const FeSpace& space, const ContactPairing& pairing,
                                                     std::span<const Voigt> nodal_stress,
                                                     const ActiveSet& active) {
  const Vec2 n = pairing.normal;
  auto pressure = [&](int node) {
    const Voigt& s = nodal_stress[static_cast<std::size_t>(node)];
    return -(n.x * n.x * s[0] + n.y * n.y * s[1] + 2.0 * n.x * n.y * s[2]);
  };
  std::vector<PressureSample> out(pairing.size());
  // Arc length along the solid-1 node chain (pairs are in transverse order).
  std::vector<double> arc(pairing.size(), 0.0);
  for (std::size_t i = 1; i < pairing.size(); ++i)
    arc[i] = arc[i - 1] + norm(space.node_position(pairing.pairs[i].first) -
                               space.node_position(pairing.pairs[i - 1].first));
  std::vector<char> is_active(pairing.size(), 0);
  for (int i : active) is_active[static_cast<std::size_t>(i)] = 1;
  double center = 0.0;
  if (!active.empty()) {
    const auto [lo, hi] = std::minmax_element(active.begin(), active.end());
    center = 0.5 * (arc[static_cast<std::size_t>(*lo)] + arc[static_cast<std::size_t>(*hi)]);
  } else if (!arc.empty()) {
    center = 0.5 * arc.back();
  }
  for (std::size_t i = 0; i < pairing.size(); ++i) {
    out[i].pair = static_cast<int>(i);
    out[i].s = arc[i] - center;
    out[i].r = std::abs(out[i].s);
    out[i].p = 0.5 * (pressure(pairing.pairs[i].first) + pressure(pairing.pairs[i].second));
    out[i].active = is_active[i] != 0;
  }
  return out;
}

}  // namespace camr
