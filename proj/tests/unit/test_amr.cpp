#include <algorithm>
#include <cmath>
#include <random>

#include "camr/amr/loop.hpp"
#include "camr/bench/hertz.hpp"
#include "camr/fem/constraints.hpp"
#include "camr/mesh/generators.hpp"
#include "doctest.h"

using namespace camr;

namespace {

MaterialTable two_solids() { return {{1, Material{200e9, 0.3}}, {2, Material{70e9, 0.25}}}; }

std::vector<double> sample_field(const FeSpace& space, auto field) {
  std::vector<double> u(space.num_dofs());
  for (int n = 0; n < static_cast<int>(space.num_nodes()); ++n) {
    const Vec2 v = field(space.node_position(n), space.node_solid(n));
    u[2 * static_cast<std::size_t>(n)] = v.x;
    u[2 * static_cast<std::size_t>(n) + 1] = v.y;
  }
  return u;
}

// Mesh with hanging nodes in both solids.
Mesh refined_blocks() {
  Mesh m = make_stacked_blocks(4, 2, 1.0, 0.5, 0.1, 1);
  m.refine_in_place({0, 9});
  m.refine_in_place({m.leaves().front()});
  return m;
}

ErrorField field_of(std::vector<double> xi, std::vector<double> omega) {
  ErrorField f;
  for (std::size_t i = 0; i < xi.size(); ++i) f.elements.push_back(static_cast<int>(i));
  double x2 = 0, o2 = 0;
  for (std::size_t i = 0; i < xi.size(); ++i) x2 += xi[i] * xi[i], o2 += omega[i] * omega[i];
  f.xi = std::move(xi);
  f.omega = std::move(omega);
  f.xi_global = std::sqrt(x2);
  f.omega_global = std::sqrt(o2);
  return f;
}

}  // namespace

TEST_CASE("recovery is exact for piecewise constant strain, so the estimate vanishes") {
  const Mesh mesh = refined_blocks();
  FeSpace space(mesh, 1);
  REQUIRE_FALSE(space.constraints().empty());
  const auto mats = two_solids();
  // Different linear fields per solid: each solid has its own constant stress.
  auto u = sample_field(space, [](Vec2 x, int solid) {
    return solid == 1 ? Vec2{1e-3 * x.x + 2e-4 * x.y, -5e-4 * x.y} : Vec2{-3e-4 * x.y, 7e-4 * x.x + 1e-4 * x.y};
  });
  const auto sigma = recover_stress(mesh, space, u, mats);
  const Voigt s1 = mats.of(1).stress({1e-3, -5e-4, 2e-4});
  const Voigt s2 = mats.of(2).stress({0.0, 1e-4, 4e-4});
  for (int n = 0; n < static_cast<int>(space.num_nodes()); ++n) {
    const Voigt& want = space.node_solid(n) == 1 ? s1 : s2;
    for (int c = 0; c < 3; ++c) CHECK(sigma[static_cast<std::size_t>(n)][c] == doctest::Approx(want[c]).scale(1e8));
  }
  const auto errors = element_errors(mesh, space, u, sigma, mats);
  CHECK(errors.xi_global <= 1e-10 * errors.omega_global);
  CHECK(errors.gamma() <= 1e-10);
}

TEST_CASE("element error agrees with a fine midpoint-rule oracle on rectangles") {
  // Axis-aligned rectangles: the Q1 stress and the recovered field are known in
  // closed form from the nodal values, so the energy norm can be integrated directly.
  Mesh mesh = make_rectangle(3, 2, {0, 0}, 1.5, 1.0, 1, {tags::kDirichlet, tags::kNone, tags::kNone, tags::kNone});
  FeSpace space(mesh, 1);
  const MaterialTable mats{{1, Material{1.0, 0.2}}};
  const Material& mat = mats.of(1);
  auto u = sample_field(space, [](Vec2 x, int) {
    return Vec2{0.1 * x.x * x.x + 0.05 * x.y * x.x, -0.2 * x.y * x.y + 0.03 * x.x};
  });
  const auto sigma = recover_stress(mesh, space, u, mats);
  const auto errors = element_errors(mesh, space, u, sigma, mats);
  const auto compliance = [&](const Voigt& s) {
    const Voigt e = mat.strain(s);
    return s[0] * e[0] + s[1] * e[1] + s[2] * e[2];
  };
  for (std::size_t i = 0; i < space.num_elements(); ++i) {
    const int* nodes = space.element_nodes(i);
    // Corner order follows the reference square: (-1,-1), (1,-1), (1,1), (-1,1).
    const Vec2 lo = space.node_position(nodes[0]), hi = space.node_position(nodes[2]);
    const double w = hi.x - lo.x, h = hi.y - lo.y;
    auto at = [&](int a, int c) { return u[2 * static_cast<std::size_t>(nodes[a]) + static_cast<std::size_t>(c)]; };
    const int m = 200;
    double e2 = 0.0, s2 = 0.0;
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        const double s = (p + 0.5) / m, t = (q + 0.5) / m;
        const double wts[4] = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
        const double ds[4] = {-(1 - t), 1 - t, t, -t};
        const double dt[4] = {-(1 - s), -s, s, 1 - s};
        Voigt eps{}, star{};
        for (int a = 0; a < 4; ++a) {
          eps[0] += ds[a] / w * at(a, 0);
          eps[1] += dt[a] / h * at(a, 1);
          eps[2] += dt[a] / h * at(a, 0) + ds[a] / w * at(a, 1);
          for (int c = 0; c < 3; ++c) star[c] += wts[a] * sigma[static_cast<std::size_t>(nodes[a])][c];
        }
        const Voigt sh = mat.stress(eps);
        const Voigt d{star[0] - sh[0], star[1] - sh[1], star[2] - sh[2]};
        e2 += compliance(d) * w * h / (m * m);
        s2 += compliance(sh) * w * h / (m * m);
      }
    CHECK(errors.xi[i] == doctest::Approx(std::sqrt(e2)).epsilon(1e-4));
    CHECK(errors.omega[i] == doctest::Approx(std::sqrt(s2 + e2)).epsilon(1e-4));
  }
}

TEST_CASE("root-sum-square identities and a perturbation stays in its solid") {
  const Mesh mesh = refined_blocks();
  FeSpace space(mesh, 1);
  const auto mats = two_solids();
  std::mt19937 gen(3);
  std::normal_distribution<double> noise(0.0, 1e-4);
  std::vector<double> u(space.num_dofs());
  for (auto& x : u) x = noise(gen);
  // Hanging DOFs follow their masters.
  auto dofs = build_dofmap(space);
  auto p = build_prolongation(space, dofs);
  std::vector<double> conf(dofs.num_conforming());
  for (auto& x : conf) x = noise(gen);
  u = p * std::span<const double>(conf);
  const auto sigma = recover_stress(mesh, space, u, mats);
  const auto f = element_errors(mesh, space, u, sigma, mats);
  double x2 = 0, o2 = 0;
  for (std::size_t i = 0; i < f.xi.size(); ++i) {
    x2 += f.xi[i] * f.xi[i];
    o2 += f.omega[i] * f.omega[i];
    CHECK(f.omega[i] >= f.xi[i]);
  }
  CHECK(f.xi_global == doctest::Approx(std::sqrt(x2)).epsilon(1e-12));
  CHECK(f.omega_global == doctest::Approx(std::sqrt(o2)).epsilon(1e-12));

  // Perturb one solid-2 node: nothing recovered in solid 1 changes.
  auto v = u;
  for (int n = 0; n < static_cast<int>(space.num_nodes()); ++n)
    if (space.node_solid(n) == 2) {
      v[2 * static_cast<std::size_t>(n)] += 1e-3;
      break;
    }
  const auto sigma2 = recover_stress(mesh, space, v, mats);
  const auto g = element_errors(mesh, space, v, sigma2, mats);
  for (int n = 0; n < static_cast<int>(space.num_nodes()); ++n)
    if (space.node_solid(n) == 1)
      for (int c = 0; c < 3; ++c) CHECK(sigma2[static_cast<std::size_t>(n)][c] == sigma[static_cast<std::size_t>(n)][c]);
  for (std::size_t i = 0; i < f.xi.size(); ++i)
    if (mesh.element(f.elements[i]).solid == 1) CHECK(g.xi[i] == f.xi[i]);
}

TEST_CASE("thresholds and marking") {
  const auto f = field_of({0.1, 0.5, 0.02, 0.3}, {1.0, 1.0, 0.1, 2.0});
  AmrTargets zz;
  zz.e_global = 0.2;
  const auto t = thresholds(f, zz);
  for (double x : t) CHECK(x == doctest::Approx(0.2 * f.omega_global / 2.0));
  // Threshold 0.2 sqrt(6.01) / 2 = 0.245.
  CHECK(mark(f, t, nullptr) == std::set<int>{1, 3});

  AmrTargets loc;
  loc.combination = Combination::LocLocal;
  loc.e_local = 0.15;
  const auto tl = thresholds(f, loc);
  CHECK(tl[0] == doctest::Approx(0.15));
  CHECK(tl[3] == doctest::Approx(0.3));
  // 0.1 < 0.15, 0.5 > 0.15, 0.02 > 0.015, 0.3 = 0.3 is not above.
  CHECK(mark(f, tl, nullptr) == std::set<int>{1, 2});

  // Contact partners join the marked set.
  ContactPairing pairing;
  pairing.partner_of = {{2, 40}, {40, 2}, {3, 41}, {41, 3}};
  CHECK(mark(f, tl, &pairing) == std::set<int>{1, 2, 40});
}

TEST_CASE("target validation") {
  AmrTargets t;
  CHECK_NOTHROW(t.validate());
  t.e_global = 0.0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {};
  t.e_local = 1.0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {};
  t.delta = -0.1;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {};
  t.n_max = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("stopping rules") {
  // 40 x 50 unit square: every element has area 1/2000 = 0.0005.
  const Mesh mesh = make_rectangle(40, 50, {0, 0}, 1.0, 1.0, 1);
  const auto leaves = mesh.leaves();
  std::vector<double> ones(leaves.size(), 1.0);
  ErrorField f = field_of(ones, ones);
  f.elements = leaves;

  AmrTargets loc;
  loc.combination = Combination::LocLocal;
  loc.delta = 0.001;
  auto d = should_stop(f, {leaves[0]}, mesh, loc, 1);
  CHECK(d.eta == doctest::Approx(0.0005));
  CHECK(d.stop);
  CHECK(d.reason == StopReason::LocalArea);
  d = should_stop(f, {leaves[0], leaves[1], leaves[2], leaves[3]}, mesh, loc, 1);
  CHECK(d.eta == doctest::Approx(0.002));
  CHECK_FALSE(d.stop);
  // delta = 0 only stops once nothing is marked.
  loc.delta = 0.0;
  CHECK_FALSE(should_stop(f, {leaves[0]}, mesh, loc, 1).stop);
  d = should_stop(f, {}, mesh, loc, 1);
  CHECK(d.stop);
  CHECK(d.reason == StopReason::EmptyMarking);
  // The budget always ends the loop.
  loc.n_max = 3;
  d = should_stop(f, {leaves[0]}, mesh, loc, 3);
  CHECK(d.reason == StopReason::Budget);

  AmrTargets zz;
  zz.e_global = 0.5;
  ErrorField small = field_of(std::vector<double>(leaves.size(), 0.4), ones);
  small.elements = leaves;
  d = should_stop(small, {leaves[7]}, mesh, zz, 1);
  CHECK(d.reason == StopReason::Target);
  d = should_stop(f, {}, mesh, zz, 1);
  CHECK(d.reason == StopReason::EmptyMarking);
  d = should_stop(f, {leaves[7]}, mesh, zz, 1);
  CHECK_FALSE(d.stop);
  CHECK(to_string(StopReason::Target) == "TARGET");
  CHECK(to_string(StopReason::LocalArea) == "LOCAL");
}

TEST_CASE("refinement closure keeps pairs and the 2:1 rule") {
  HertzParams hp;
  hp.n0 = 4;
  Mesh mesh = make_hertz(hp).mesh;
  for (int round = 0; round < 3; ++round) {
    FeSpace space(mesh, 1);
    auto pairing = pair_nodes(mesh, space, tags::kContact1, tags::kContact2, {0, 1});
    // Mark the solid-1 contact element nearest the apex only.
    int apex = -1;
    double best = INFINITY;
    for (const auto& [e1, e2] : pairing.element_pairs) {
      const double x = std::abs(mesh.geometry_map(e1, {0, 0}).x);
      if (x < best) best = x, apex = e1;
    }
    const auto closed = refinement_closure(mesh, {apex}, pairing);
    CHECK(closed.count(apex) == 1);
    CHECK(closed.count(pairing.partner(apex)) == 1);
    for (int e : closed)
      if (int p = pairing.partner(e); p >= 0) CHECK(closed.count(p) == 1);
    mesh.refine_in_place(closed);
    CHECK(mesh.two_to_one_violations().empty());
    FeSpace after(mesh, 1);
    CHECK_NOTHROW(pair_nodes(mesh, after, tags::kContact1, tags::kContact2, {0, 1}));
  }
}

TEST_CASE("adaptive loop on a coarse half-disk pair") {
  HertzParams hp;
  hp.n0 = 4;
  hp.geom_order = 4;
  auto problem = make_hertz(hp);
  AmrConfig cfg;
  cfg.targets.e_global = 0.05;
  cfg.targets.n_max = 3;
  int seen = 0;
  auto result = amr_contact_loop(problem, cfg, [&](const AmrSnapshot& s) {
    ++seen;
    REQUIRE(s.plan != nullptr);
    auto rep = validate(*s.plan, *s.pairing, *s.mesh);
    CHECK(rep.ok());
    CHECK(s.plan->contact_ranks == compute_rc(2 * static_cast<long long>(s.pairing->element_pairs.size()),
                                              static_cast<long long>(s.mesh->num_leaves()), cfg.ranks, cfg.c));
  });
  REQUIRE_FALSE(result.report.empty());
  CHECK(seen == static_cast<int>(result.report.size()));
  CHECK(result.report.back().stop != StopReason::None);
  for (std::size_t i = 0; i + 1 < result.report.size(); ++i) {
    CHECK(result.report[i].stop == StopReason::None);
    CHECK(result.report[i + 1].elements > result.report[i].elements);
    CHECK(result.report[i].colocation_violations == 0);
  }
  CHECK(static_cast<int>(result.report.size()) <= cfg.targets.n_max);
  CHECK(result.mesh.two_to_one_violations().empty());
}
