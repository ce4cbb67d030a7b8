// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,3,7]
//
// Every criterion builds its own inputs; expensive reference solves are shared
// between criteria through lazily filled caches.

#include <CLI11.hpp>
#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "camr/bench/studies.hpp"
#include "camr/fem/constraints.hpp"
#include "camr/fem/elasticity.hpp"
#include "camr/mesh/generators.hpp"
#include "camr/simd/kernels.hpp"
#include "helpers.hpp"
#include "partition_oracle.hpp"

using namespace camr;

namespace {

// Commonly quoted values for this 2D benchmark; printed for comparison, never asserted.
constexpr double kPublishedA = 0.199;
constexpr double kPublishedPo = 11.5e9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Checks that hold on every AMR iterate produced anywhere in the run.
struct RunInvariants {
  long snapshots = 0;
  long rss_failures = 0;
  long idempotence_failures = 0;
  long colocation_failures = 0;

  void observe(const AmrSnapshot& s) {
    ++snapshots;
    const ErrorField& f = *s.errors;
    double x2 = 0.0, o2 = 0.0;
    bool ok = f.xi.size() == f.omega.size() && f.xi.size() == f.elements.size();
    for (std::size_t i = 0; ok && i < f.xi.size(); ++i) {
      x2 += f.xi[i] * f.xi[i];
      o2 += f.omega[i] * f.omega[i];
      ok = f.omega[i] >= f.xi[i];
    }
    ok = ok && std::abs(f.xi_global - std::sqrt(x2)) <= 1e-12 * std::max(f.omega_global, 1e-300) &&
         std::abs(f.omega_global - std::sqrt(o2)) <= 1e-12 * f.omega_global;
    if (!ok) ++rss_failures;
    if (active_set(s.pairing->b, s.pairing->gaps, *s.u) != *s.active) ++idempotence_failures;
    if (validate(*s.plan, *s.pairing, *s.mesh).colocation_violations != 0) ++colocation_failures;
  }
};

RunInvariants g_invariants;

struct AmrRun {
  AmrResult result;
  std::vector<PressureSample> profile;
  std::optional<HertzFit> fit;
  double seconds = 0.0;
};

AmrRun run_amr(const HertzParams& params, const AmrConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  AmrRun run;
  run.result = amr_contact_loop(make_hertz(params), config, [&](const AmrSnapshot& s) {
    g_invariants.observe(s);
    run.profile = contact_pressure_profile(*s.space, *s.pairing, *s.stress, *s.active);
  });
  try {
    run.fit = calibrate_hertz(run.profile);
  } catch (const Error&) {
  }
  run.seconds = seconds_since(t0);
  return run;
}

AmrConfig amr1(double e_global, int n_max = 10) {
  AmrConfig c;
  c.targets.combination = Combination::ZzGlobal;
  c.targets.e_global = e_global;
  c.targets.n_max = n_max;
  return c;
}

AmrConfig amr2(double e_local, double delta, int n_max) {
  AmrConfig c;
  c.targets.combination = Combination::LocLocal;
  c.targets.e_local = e_local;
  c.targets.delta = delta;
  c.targets.n_max = n_max;
  return c;
}

const SolvedLevel& hertz_ref() {
  static std::optional<SolvedLevel> ref;
  if (!ref) {
    std::cout << "  [graded Q1 reference solve]" << std::endl;
    ref = hertz_reference(HertzParams{}, GradedReference{});
    if (!ref->fitted) throw Error("reference profile has no compressive support");
  }
  return *ref;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const SolvedLevel& ref = hertz_ref();
  const HertzFit& law = ref.fit;
  std::ostringstream d;
  d << fmt("reference a=%.5f m p_O=%.4g Pa residual=%.4f (benchmark values a=%.3f p_O=%.3g)", law.a, law.p_o,
           law.residual, kPublishedA, kPublishedPo);
  bool pass = law.residual <= 0.05;
  double prev = INFINITY;
  for (double e : {0.05, 0.02, 0.01}) {
    const AmrRun run = run_amr(HertzParams{}, amr1(e));
    const double err = profile_error(run.profile, law);
    d << fmt("; e=%g%%: profile error %.4f (%zu elements, %.0f s)", 100 * e, err,
             run.result.report.back().elements, run.seconds);
    pass = pass && err < prev && run.seconds <= 600.0;
    prev = err;
  }
  return {pass, d.str()};
}

Outcome criterion2() {
  HertzParams p;
  p.alpha = 0.15;
  const auto study = run_penalty_study(make_hertz(p), PenaltySettings{}, SolveSettings{});
  std::ostringstream d;
  d << fmt("slope over [1e2 E, 1e6 E] = %.4f; interpenetration/h:", study.slope);
  for (const auto& pt : study.refinement) d << fmt(" L%d %.4g", pt.level, pt.interpenetration / pt.h);
  d << fmt("; largest successive change %.1f%%", 100 * study.scaled_variation);
  const bool pass = std::abs(study.slope + 1.0) <= 0.1 && study.scaled_variation <= 0.2 && study.refinement.size() >= 3;
  return {pass, d.str()};
}

Outcome criterion3() {
  ConvergenceSettings s;
  const auto study = run_convergence(make_hertz(HertzParams{}), s, [](const AmrSnapshot& snap) { g_invariants.observe(snap); });
  std::ostringstream d;
  d << fmt("Q1 h-slope %.3f, Q2 h-slope %.3f (reference Q%d level %d, %zu DOFs)", study.q1_h_slope, study.q2_h_slope,
           s.reference_order, s.reference_level, study.reference_dofs);
  bool pass = std::abs(study.q1_h_slope - 1.0) <= 0.15 && std::abs(study.q2_h_slope - 1.5) <= 0.2;
  if (study.matched.found) {
    d << fmt("; AMR matches error %.4g with %.0f DOFs vs %zu uniform (ratio %.3f)", study.matched.error,
             study.matched.amr_dofs, study.matched.uniform_dofs, study.matched.ratio);
    pass = pass && study.matched.ratio <= 1.0 / 3.0;
  } else {
    d << "; AMR never reaches a uniform error";
    pass = false;
  }
  return {pass, d.str()};
}

Outcome criterion4() {
  struct Case {
    AmrConfig config;
    std::string name;
  };
  const std::vector<Case> grid{
      {amr1(0.10), "AMR1 e=10%"},           {amr1(0.05), "AMR1 e=5%"},
      {amr1(0.03), "AMR1 e=3%"},            {amr2(0.30, 0.05, 6), "AMR2 e=30% delta=0.05"},
      {amr2(0.30, 0.02, 6), "AMR2 e=30% delta=0.02"}, {amr2(0.10, 0.05, 6), "AMR2 e=10% delta=0.05"},
  };
  bool pass = true;
  int checked[2] = {0, 0};
  std::ostringstream d;
  for (const auto& c : grid) {
    const AmrRun run = run_amr(HertzParams{}, c.config);
    const AmrIteration& last = run.result.report.back();
    const bool zz = c.config.targets.combination == Combination::ZzGlobal;
    d << fmt("%s%s: %s after %zu iterations, gamma=%.4f eta=%.4g", checked[0] + checked[1] == 0 && &c == grid.data() ? "" : "; ",
             c.name.c_str(), to_string(last.stop).c_str(), run.result.report.size(), last.gamma, last.eta);
    if (last.stop == StopReason::Budget) continue;
    ++checked[zz ? 0 : 1];
    pass = pass && (zz ? last.gamma <= c.config.targets.e_global : last.eta <= c.config.targets.delta);
  }
  d << fmt("; non-budget terminations checked: %d AMR1, %d AMR2", checked[0], checked[1]);
  return {pass && checked[0] > 0 && checked[1] > 0, d.str()};
}

Mesh random_refinement(Mesh m, std::mt19937& gen, int rounds) {
  for (int r = 0; r < rounds; ++r) {
    const auto leaves = m.leaves();
    std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
    std::set<int> marked;
    const std::size_t n = 1 + leaves.size() / 10;
    while (marked.size() < n) marked.insert(leaves[pick(gen)]);
    m.refine_in_place(m.two_to_one_closure(marked));
  }
  return m;
}

Outcome criterion5() {
  std::mt19937 gen(5);
  double worst_patch = 0.0, worst_asym = 0.0, worst_pt = 0.0;
  int not_pd = 0, without_hanging = 0;
  const MaterialTable mats{{1, Material{210e9, 0.3}}, {2, Material{210e9, 0.3}}};
  for (int pattern = 0; pattern < 20; ++pattern) {
    // Patch test on a straight-sided square.
    {
      using namespace tags;
      Mesh m = random_refinement(make_rectangle(3, 3, {0, 0}, 1.0, 1.0, 1, {kDirichlet, kDirichlet, kDirichlet, kDirichlet}), gen, 3);
      FeSpace s(m, 1);
      if (s.constraints().empty()) ++without_hanging;
      auto dm = build_dofmap(s);
      auto p = build_prolongation(s, dm);
      auto sys = assemble_stiffness(m, s, mats);
      auto conf = form_conforming(sys.stiffness, sys.load, p);
      auto field = [](Vec2 x) { return Vec2{1e-3 * (1 + 2 * x.x + 3 * x.y), 1e-3 * (-1 + x.x - 4 * x.y)}; };
      DirichletSet ds;
      for (int n : s.nodes_on_tag(kDirichlet)) {
        const Vec2 v = field(s.node_position(n));
        ds.add(dm.full_to_conforming[2 * static_cast<std::size_t>(n)], v.x);
        ds.add(dm.full_to_conforming[2 * static_cast<std::size_t>(n) + 1], v.y);
      }
      auto red = apply_dirichlet(conf, ds);
      auto sol = pcg_solve(red.matrix, red.rhs, {}, {.rel_tol = 1e-15});
      auto full = p * std::span<const double>(red.scatter(sol.x));
      for (std::size_t n = 0; n < s.num_nodes(); ++n) {
        const Vec2 v = field(s.node_position(static_cast<int>(n)));
        worst_patch = std::max({worst_patch, std::abs(full[2 * n] - v.x) / 1e-3, std::abs(full[2 * n + 1] - v.y) / 1e-3});
      }
    }
    // Congruence and definiteness on the curved half-disk pair.
    {
      HertzParams hp;
      hp.n0 = 2;
      auto problem = make_hertz(hp);
      Mesh m = random_refinement(problem.mesh, gen, 3);
      FeSpace s(m, 1);
      if (s.constraints().empty()) ++without_hanging;
      auto dm = build_dofmap(s);
      auto p = build_prolongation(s, dm);
      auto sys = assemble_stiffness(m, s, problem.materials);
      auto conf = form_conforming(sys.stiffness, sys.load, p);
      const Eigen::MatrixXd kt = testing::dense(sys.stiffness), pd = testing::dense(p);
      const Eigen::MatrixXd k = testing::dense(conf.matrix);
      const double scale = k.cwiseAbs().maxCoeff();
      worst_pt = std::max(worst_pt, (k - pd.transpose() * kt * pd).cwiseAbs().maxCoeff() / scale);
      auto red = apply_dirichlet(conf, problem.dirichlet(s, dm));
      const Eigen::MatrixXd a = testing::dense(red.matrix);
      worst_asym = std::max(worst_asym, (a - a.transpose()).cwiseAbs().maxCoeff() / scale);
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() != Eigen::Success) ++not_pd;
    }
  }
  const bool pass = worst_patch <= 1e-9 && worst_asym <= 1e-14 && worst_pt <= 1e-12 && not_pd == 0 && without_hanging == 0;
  return {pass, fmt("40 random patterns: patch error %.2e, |K - P^T K P| %.2e, asymmetry %.2e, %d not positive definite, %d without hanging nodes",
                    worst_patch, worst_pt, worst_asym, not_pd, without_hanging)};
}

Outcome criterion6() {
  struct Config {
    std::string name;
    ContactBenchmark problem;
    Mesh mesh;
    int order;
    double k_n;
  };
  std::vector<Config> configs;
  for (double alpha : {0.015, 0.15}) {
    HertzParams hp;
    hp.alpha = alpha;
    auto problem = make_hertz(hp);
    for (int l = 0; l <= 3; ++l)
      configs.push_back({fmt("Hertz alpha=%g Q1 L%d", alpha, l), problem, refine_uniformly(problem.mesh, l), 1, 1e4 * 210e9});
    for (int l = 0; l <= 2; ++l)
      configs.push_back({fmt("Hertz alpha=%g Q2 L%d", alpha, l), problem, refine_uniformly(problem.mesh, l), 2, 1e4 * 210e9});
    for (double f : {1.0, 1e6})
      configs.push_back({fmt("Hertz alpha=%g Q1 L2 kN=%gE", alpha, f), problem, refine_uniformly(problem.mesh, 2), 1, f * 210e9});
  }
  int failures = 0, max_sweeps = 0;
  std::ostringstream bad;
  for (const auto& c : configs) {
    const auto fs = solve_on_mesh(c.problem, c.mesh, c.order, c.k_n, 10, PcgOptions{.rel_tol = 1e-12});
    const int sweeps = static_cast<int>(fs.contact.trace.size());
    max_sweeps = std::max(max_sweeps, sweeps);
    bool ok = fs.contact.converged && sweeps <= 10 &&
              active_set(fs.pairing.b, fs.pairing.gaps, fs.contact.u_full) == fs.contact.active;
    if (ok) {
      const auto again = solve_on_mesh(c.problem, c.mesh, c.order, c.k_n, 10, PcgOptions{.rel_tol = 1e-12},
                                       fs.contact.u_conforming, fs.contact.active);
      ok = again.contact.converged && again.contact.trace.size() == 1 && again.contact.active == fs.contact.active;
    }
    if (!ok) {
      ++failures;
      bad << " " << c.name;
    }
  }
  const bool pass = failures == 0 && g_invariants.idempotence_failures == 0;
  return {pass, fmt("%zu fixed-mesh configurations, worst %d sweeps, %d failures%s; %ld AMR iterates, %ld not idempotent",
                    configs.size(), max_sweeps, failures, bad.str().c_str(), g_invariants.snapshots,
                    g_invariants.idempotence_failures)};
}

Outcome criterion7() {
  using namespace camr::testing;
  std::ostringstream d;
  const auto regions = worked_instance();
  const auto p = plan(regions, 8, 1.0);
  std::map<int, int> rank;
  for (const auto& a : p.assignments) rank[a.element] = a.rank;
  const bool worked = p.contact_ranks == 2 && rank[4500] == 6 && rank[5500] == 7;
  d << fmt("worked instance: R_C=%d, region 4 first non-contact -> %d, region 5 -> %d", p.contact_ranks, rank[4500], rank[5500]);

  std::mt19937 gen(20240611);
  int mismatches = 0, colocation = 0, separation = 0, imbalance = 0, planned = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int ranks = std::uniform_int_distribution<int>(2, 12)(gen);
    const int nreg = std::uniform_int_distribution<int>(1, ranks)(gen);
    std::vector<int> supers, others;
    for (int r = 0; r < nreg; ++r) {
      supers.push_back(std::uniform_int_distribution<int>(0, 6)(gen));
      others.push_back(std::uniform_int_distribution<int>(0, 12)(gen));
    }
    others[0] += 1;
    const auto regs = make_regions(supers, others);
    long long n_ec = 0, n_e = 0;
    for (const auto& r : regs) n_ec += 2 * static_cast<long long>(r.super_elements.size()), n_e += static_cast<long long>(r.num_elements());
    const int rc = rc_oracle(n_ec, n_e, ranks, 1, 1);
    const auto pl = plan(regs, ranks, 1.0);
    ++planned;
    if (pl.contact_ranks != rc) ++mismatches;
    const auto expected = dealing_oracle(regs, ranks, rc);
    std::map<int, int> got;
    for (const auto& a : pl.assignments) got[a.element] = a.rank;
    if (got != expected) ++mismatches;
    std::vector<int> sup(static_cast<std::size_t>(ranks), 0), non(static_cast<std::size_t>(ranks), 0);
    int contrib_s = 0, contrib_n = 0;
    for (const auto& r : regs) {
      contrib_s += rc > 0 && !r.super_elements.empty();
      contrib_n += !r.non_contact.empty() || (rc == 0 && !r.super_elements.empty());
      for (const auto& s : r.super_elements) {
        if (got[s.solid1] != got[s.solid2]) ++colocation;
        if (rc > 0 && got[s.solid1] >= rc) ++separation;
        ++sup[static_cast<std::size_t>(got[s.solid1])];
      }
      for (int e : r.non_contact) {
        if (got[e] < rc) ++separation;
        ++non[static_cast<std::size_t>(got[e])];
      }
    }
    if (rc > 0) {
      auto [lo, hi] = std::minmax_element(sup.begin(), sup.begin() + rc);
      if (*hi - *lo > contrib_s) ++imbalance;
    }
    std::vector<int> load(non.begin() + rc, non.end());
    if (rc == 0)
      for (int r = 0; r < ranks; ++r) load[static_cast<std::size_t>(r)] += sup[static_cast<std::size_t>(r)];
    if (!load.empty()) {
      auto [lo, hi] = std::minmax_element(load.begin(), load.end());
      if (*hi - *lo > contrib_n) ++imbalance;
    }
  }
  d << fmt("; %d random instances: %d oracle mismatches, %d co-location, %d separation, %d imbalance violations; "
           "%ld AMR plans with co-location violations",
           planned, mismatches, colocation, separation, imbalance, g_invariants.colocation_failures);
  const bool pass = worked && mismatches == 0 && colocation == 0 && separation == 0 && imbalance == 0 &&
                    g_invariants.colocation_failures == 0;
  return {pass, d.str()};
}

Outcome criterion8() {
  // Q1 contains the linear fields only on isoparametric (bilinear) geometry,
  // so the meshes here use geometry order 1.
  std::mt19937 gen(8);
  double worst = 0.0;
  int runs = 0;
  for (int pattern = 0; pattern < 10; ++pattern) {
    HertzParams hp;
    hp.n0 = 3;
    hp.geom_order = 1;
    hp.upper = Material{70e9, 0.25};
    auto problem = make_hertz(hp);
    for (const Mesh& m : {random_refinement(problem.mesh, gen, 3),
                          random_refinement(make_stacked_blocks(3, 2, 1.0, 0.5, 0.1, 1), gen, 3)}) {
      FeSpace s(m, 1);
      std::uniform_real_distribution<double> coef(-1e-3, 1e-3);
      double a[6];
      for (double& x : a) x = coef(gen);
      std::vector<double> u(s.num_dofs());
      for (int n = 0; n < static_cast<int>(s.num_nodes()); ++n) {
        const Vec2 x = s.node_position(n);
        u[2 * static_cast<std::size_t>(n)] = a[0] + a[1] * x.x + a[2] * x.y;
        u[2 * static_cast<std::size_t>(n) + 1] = a[3] + a[4] * x.x + a[5] * x.y;
      }
      const auto sigma = recover_stress(m, s, u, problem.materials);
      const auto f = element_errors(m, s, u, sigma, problem.materials);
      worst = std::max(worst, f.xi_global / f.omega_global);
      ++runs;
    }
  }
  const bool pass = worst <= 1e-12 && g_invariants.rss_failures == 0;
  return {pass, fmt("%d linear fields on refined meshes: worst xi/omega %.2e; RSS identities checked on %ld AMR iterates, %ld failures",
                    runs, worst, g_invariants.snapshots, g_invariants.rss_failures)};
}

Outcome criterion9() {
  const HertzParams hp;
  const AmrRun run = run_amr(hp, amr2(0.07, 0.001, 6));
  const Mesh& mesh = run.result.mesh;
  const double a = run.fit ? run.fit->a : hertz_ref().fit.a;
  // Points where the contact status changes, on both arcs of the undeformed pair.
  const double y_arc = 0.5 * hp.gap + hp.radius - std::sqrt(hp.radius * hp.radius - a * a);
  const std::array<Vec2, 4> edges{Vec2{-a, -y_arc}, Vec2{a, -y_arc}, Vec2{-a, y_arc}, Vec2{a, y_arc}};
  const int top = mesh.max_level();
  int finest = 0, inside = 0;
  double worst = 0.0;
  for (int e : mesh.leaves()) {
    if (mesh.element(e).level != top) continue;
    ++finest;
    const Vec2 c = mesh.geometry_map(e, {0, 0});
    double dist = INFINITY;
    for (const Vec2& p : edges) dist = std::min(dist, norm(c - p));
    const double rel = dist / mesh.element_diameter(e);
    worst = std::max(worst, rel);
    if (rel <= 1.5) ++inside;
  }
  const auto& last = run.result.report.back();
  const bool pass = finest > 0 && inside == finest;
  return {pass, fmt("a=%.5f m, %s after %zu iterations (eta=%.4g); %d of %d level-%d elements within 1.5 diameters of "
                    "the contact edge, farthest at %.1f diameters (%.0f s)",
                    a, to_string(last.stop).c_str(), run.result.report.size(), last.eta, inside, finest, top, worst,
                    run.seconds)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the contact AMR benchmark"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',')->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (only.empty()) only = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::sort(only.begin(), only.end());

  // Budgets in seconds; criterion 1 also bounds each AMR point separately.
  const std::map<int, std::pair<std::function<Outcome()>, double>> criteria{
      {1, {criterion1, 3 * 600.0 + 600.0}}, {2, {criterion2, 300.0}}, {3, {criterion3, 1200.0}},
      {4, {criterion4, 600.0}},             {5, {criterion5, 60.0}},  {6, {criterion6, 300.0}},
      {7, {criterion7, 60.0}},              {8, {criterion8, 60.0}},  {9, {criterion9, 600.0}},
  };
  std::cout << "kernels: " << simd::isa_name(simd::active_isa()) << std::endl;
  int failed = 0;
  for (int id : only) {
    const auto& [fn, budget] = criteria.at(id);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(t0);
    const bool in_time = t <= budget;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::cout << "CRITERION " << id << (pass ? " PASS " : " FAIL ") << out.detail
              << fmt(" [%.1f s of %.0f s%s]", t, budget, in_time ? "" : ", over budget") << std::endl;
  }
  std::cout << (failed == 0 ? "ALL PASS" : fmt("%d FAILED", failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
