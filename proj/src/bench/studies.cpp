#include "camr/bench/studies.hpp"

#include <algorithm>
#include <cmath>

#include "camr/fem/transfer.hpp"
#include "camr/mesh/generators.hpp"

namespace camr {

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (int leaf : mesh.leaves()) h = std::max(h, mesh.element_diameter(leaf));
  return h;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw ConfigError("log-log slope of non-positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw ConfigError("slope of coincident abscissae");
  return sxy / sxx;
}

SolvedLevel solve_level(const ContactBenchmark& problem, Mesh mesh, int level, int order, double k_n,
                        const SolveSettings& settings) {
  FixedSolve fs = solve_on_mesh(problem, mesh, order, k_n, settings.l_max, settings.pcg);
  if (!fs.contact.converged)
    throw SolverError("contact loop did not reach a fixed point on level " + std::to_string(level), 0.0,
                      fs.contact.pcg_iterations);
  SolvedLevel out{level, std::move(mesh), std::move(fs), {}, {}, false, {}};
  if (order == 1) {
    out.stress = recover_stress(out.mesh, out.solve.space, out.solve.contact.u_full, problem.materials);
    out.profile = contact_pressure_profile(out.solve.space, out.solve.pairing, out.stress, out.solve.contact.active);
    if (std::any_of(out.profile.begin(), out.profile.end(), [](const PressureSample& s) { return s.p > 0.0; })) {
      try {
        out.fit = calibrate_hertz(out.profile);
        out.fitted = true;
      } catch (const Error&) {
        out.fitted = false;
      }
    }
  }
  return out;
}

std::vector<UniformLevel> run_uniform(const ContactBenchmark& problem, int levels, int order, double k_n,
                                      const SolveSettings& settings, const LevelObserver& observer) {
  if (levels < 0) throw ConfigError("level count must be non-negative");
  std::vector<UniformLevel> out;
  Mesh mesh = problem.mesh;
  for (int l = 0; l <= levels; ++l) {
    if (l > 0) mesh = refine_uniformly(mesh, 1);
    const SolvedLevel s = solve_level(problem, mesh, l, order, k_n, settings);
    UniformLevel row;
    row.level = l;
    row.elements = mesh.num_leaves();
    row.dofs = s.solve.dofs.num_conforming();
    row.h = mesh_size(mesh);
    row.sweeps = static_cast<int>(s.solve.contact.trace.size());
    row.pcg_iterations = s.solve.contact.pcg_iterations;
    row.active = s.solve.contact.active.size();
    row.interpenetration = interpenetration(s.solve.pairing.b, s.solve.pairing.gaps, s.solve.contact.u_full);
    row.fitted = s.fitted;
    row.fit = s.fit;
    out.push_back(row);
    if (observer) observer(s);
  }
  return out;
}

namespace {

PenaltyPoint penalty_point(const ContactBenchmark& problem, const Mesh& mesh, int level, double factor,
                           const SolveSettings& settings) {
  const double k_n = factor * problem.materials.of(1).young_modulus;
  const FixedSolve fs = solve_on_mesh(problem, mesh, 1, k_n, settings.l_max, settings.pcg);
  if (!fs.contact.converged)
    throw SolverError("contact loop did not reach a fixed point at k_N/E = " + std::to_string(factor), 0.0,
                      fs.contact.pcg_iterations);
  return {level,
          mesh_size(mesh),
          factor,
          k_n,
          interpenetration(fs.pairing.b, fs.pairing.gaps, fs.contact.u_full),
          fs.contact.active.size(),
          static_cast<int>(fs.contact.trace.size())};
}

}  // namespace

PenaltyStudy run_penalty_study(const ContactBenchmark& problem, const PenaltySettings& penalty,
                               const SolveSettings& settings) {
  PenaltyStudy out;
  const Mesh fixed = refine_uniformly(problem.mesh, penalty.fixed_level);
  for (double f : penalty.factors) out.fixed_mesh.push_back(penalty_point(problem, fixed, penalty.fixed_level, f, settings));

  std::vector<double> k, d;
  for (const auto& p : out.fixed_mesh)
    if (p.factor >= penalty.slope_min_factor * (1 - 1e-12) && p.factor <= penalty.slope_max_factor * (1 + 1e-12)) {
      k.push_back(p.k_n);
      d.push_back(p.interpenetration);
    }
  out.slope = k.size() >= 2 ? log_log_slope(k, d) : NAN;

  for (int l : penalty.levels)
    out.refinement.push_back(penalty_point(problem, refine_uniformly(problem.mesh, l), l, penalty.reference_factor, settings));
  for (std::size_t i = 1; i < out.refinement.size(); ++i) {
    const double a = out.refinement[i - 1].interpenetration / out.refinement[i - 1].h;
    const double b = out.refinement[i].interpenetration / out.refinement[i].h;
    out.scaled_variation = std::max(out.scaled_variation, std::abs(b / a - 1.0));
  }
  return out;
}

Mesh graded_mesh(const Mesh& roots, std::span<const Vec2> centers, int base_level, int top_level, double radius) {
  if (base_level < 0 || top_level < base_level) throw ConfigError("need 0 <= base_level <= top_level");
  if (!(radius > 0.0)) throw ConfigError("grading radius must be positive");
  Mesh mesh = refine_uniformly(roots, base_level);
  for (int l = base_level; l < top_level; ++l) {
    std::set<int> marked;
    for (int leaf : mesh.leaves()) {
      const Vec2 c = mesh.map(leaf, {0.0, 0.0}).x;
      for (const Vec2& p : centers)
        if (norm(c - p) < radius) {
          marked.insert(leaf);
          break;
        }
    }
    mesh = refine(mesh, marked);
  }
  return mesh;
}

SolvedLevel hertz_reference(const HertzParams& params, const GradedReference& graded) {
  const ContactBenchmark problem = make_hertz(params);
  const std::array<Vec2, 2> apexes{Vec2{0.0, -0.5 * params.gap}, Vec2{0.0, 0.5 * params.gap}};
  Mesh mesh = graded_mesh(problem.mesh, apexes, graded.base_level, graded.top_level, graded.radius);
  const double k_n = graded.penalty_factor * params.lower.young_modulus;
  SolvedLevel out = solve_level(problem, std::move(mesh), graded.top_level, 1, k_n, graded.settings);
  if (!out.fitted) throw Error("reference pressure profile carries no compression");
  return out;
}

MatchedError matched_error(std::span<const ConvergencePoint> uniform, std::span<const ConvergencePoint> amr) {
  MatchedError out;
  if (uniform.empty() || amr.empty()) return out;
  double amr_min = INFINITY, amr_max = 0.0;
  for (const auto& p : amr) {
    amr_min = std::min(amr_min, p.error);
    amr_max = std::max(amr_max, p.error);
  }
  const ConvergencePoint* target = nullptr;
  for (const auto& u : uniform)
    if (u.error >= amr_min && u.error <= amr_max && (!target || u.error < target->error)) target = &u;
  if (!target) return out;
  for (std::size_t j = 0; j < amr.size(); ++j) {
    if (amr[j].error > target->error) continue;
    double dofs = static_cast<double>(amr[j].dofs);
    if (j > 0 && amr[j - 1].error > target->error) {
      const double t = std::log(amr[j - 1].error / target->error) / std::log(amr[j - 1].error / amr[j].error);
      dofs = std::exp(std::log(static_cast<double>(amr[j - 1].dofs)) +
                      t * std::log(static_cast<double>(amr[j].dofs) / static_cast<double>(amr[j - 1].dofs)));
    }
    out.found = true;
    out.error = target->error;
    out.uniform_dofs = target->dofs;
    out.amr_dofs = dofs;
    out.ratio = dofs / static_cast<double>(target->dofs);
    return out;
  }
  return out;
}

void ConvergenceSettings::validate() const {
  if (reference_order != 1 && reference_order != 2) throw ConfigError("reference order must be 1 or 2");
  if (q1_levels.size() < 2 || q2_levels.size() < 2) throw ConfigError("each convergence series needs two levels");
  for (int order : {1, 2})
    for (int l : order == 1 ? q1_levels : q2_levels) {
      if (l < 0) throw ConfigError("study levels must be non-negative");
      const int needed = order >= reference_order ? l + 2 : l;
      if (reference_level < needed)
        throw ConfigError("reference level " + std::to_string(reference_level) + " is not finer than Q" +
                          std::to_string(order) + " level " + std::to_string(l));
    }
  amr_config.targets.validate();
}

std::vector<ConvergencePoint> ConvergenceStudy::series(const std::string& name, int order) const {
  std::vector<ConvergencePoint> out;
  for (const auto& p : points)
    if (p.series == name && p.order == order) out.push_back(p);
  return out;
}

ConvergenceStudy run_convergence(const ContactBenchmark& problem, const ConvergenceSettings& conv,
                                 const AmrObserver& amr_observer) {
  conv.validate();
  const double k_n = conv.penalty_factor * problem.materials.of(1).young_modulus;
  const Mesh ref_mesh = refine_uniformly(problem.mesh, conv.reference_level);
  const FixedSolve ref = solve_on_mesh(problem, ref_mesh, conv.reference_order, k_n, conv.settings.l_max, conv.reference_pcg);
  if (!ref.contact.converged) throw SolverError("reference contact loop did not reach a fixed point", 0.0, ref.contact.pcg_iterations);

  ConvergenceStudy out;
  out.reference_dofs = ref.dofs.num_conforming();
  auto compare = [&](const Mesh& mesh, const FeSpace& space, std::span<const double> u) {
    return energy_difference(mesh, space, u, ref_mesh, ref.space, ref.contact.u_full, problem.materials, 4);
  };

  for (int order : {1, 2}) {
    for (int l : order == 1 ? conv.q1_levels : conv.q2_levels) {
      const Mesh mesh = refine_uniformly(problem.mesh, l);
      const FixedSolve fs = solve_on_mesh(problem, mesh, order, k_n, conv.settings.l_max, conv.settings.pcg);
      if (!fs.contact.converged) throw SolverError("contact loop did not reach a fixed point", 0.0, fs.contact.pcg_iterations);
      const auto e = compare(mesh, fs.space, fs.contact.u_full);
      out.points.push_back({"uniform", order, l, mesh_size(mesh), fs.dofs.num_conforming(), e.difference,
                            e.difference / e.norm_b, NAN});
    }
  }

  if (conv.amr) {
    AmrConfig cfg = conv.amr_config;
    cfg.targets.combination = Combination::ZzGlobal;
    cfg.penalty = {conv.penalty_factor, false};
    amr_contact_loop(problem, cfg, [&](const AmrSnapshot& s) {
      const auto e = compare(*s.mesh, *s.space, *s.u);
      out.points.push_back({"amr", 1, s.n, mesh_size(*s.mesh), 2 * (s.space->num_nodes() - s.space->constraints().size()), e.difference,
                            e.difference / e.norm_b, s.errors->gamma()});
      if (amr_observer) amr_observer(s);
    });
  }

  auto slope = [](const std::vector<ConvergencePoint>& pts, bool against_h) {
    std::vector<double> x, y;
    for (const auto& p : pts) {
      x.push_back(against_h ? p.h : static_cast<double>(p.dofs));
      y.push_back(p.error);
    }
    return x.size() >= 2 ? log_log_slope(x, y) : NAN;
  };
  const auto q1 = out.series("uniform", 1);
  const auto q2 = out.series("uniform", 2);
  const auto amr = out.series("amr", 1);
  out.q1_h_slope = slope(q1, true);
  out.q2_h_slope = slope(q2, true);
  out.q1_n_slope = -slope(q1, false);
  out.amr_n_slope = amr.size() >= 2 ? -slope(amr, false) : NAN;
  out.matched = matched_error(q1, amr);
  return out;
}

}  // namespace camr
