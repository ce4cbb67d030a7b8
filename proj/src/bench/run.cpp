#include "camr/bench/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "camr/bench/output.hpp"
#include "camr/bench/studies.hpp"

namespace camr {

namespace fs = std::filesystem;

namespace {

SolveSettings solve_settings(const BenchConfig& c) { return {c.amr.l_max, c.amr.pcg}; }

double penalty_of(const BenchConfig& c, const ContactBenchmark& b, const Mesh& mesh) {
  return penalty_coefficient(c.amr.penalty, mesh, b.materials);
}

std::string n(double x) { return format_number(x); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::vector<int> leaf_ranks(const PartitionPlan& plan, const Mesh& mesh, const FeSpace& space) {
  const auto table = plan.rank_table(mesh.num_elements());
  std::vector<int> out;
  out.reserve(space.num_elements());
  for (int e : space.leaves()) out.push_back(table[static_cast<std::size_t>(e)]);
  return out;
}

void fit_lines(std::ostringstream& s, std::span<const PressureSample> profile, const BenchConfig& c) {
  try {
    const HertzFit fit = calibrate_hertz(profile);
    s << "hertz_a[m]: " << n(fit.a) << "\nhertz_p_o[Pa]: " << n(fit.p_o) << "\nhertz_fit_residual[-]: " << n(fit.residual)
      << "\nhertz_samples[-]: " << fit.samples << '\n';
  } catch (const Error& e) {
    s << "hertz_fit: " << e.what() << '\n';
  }
  if (c.reference_a > 0.0) {
    const HertzFit ref{c.reference_a, c.reference_p_o, 0.0, 0};
    s << "profile_error_vs_reference[-]: " << n(profile_error(profile, ref)) << '\n';
  }
}

void run_amr(const BenchConfig& c, const fs::path& out, std::ostream& log, std::vector<std::string>& trace) {
  const ContactBenchmark bench = make_hertz(c.hertz);
  AmrConfig cfg = c.amr;
  cfg.targets.combination = c.mode == RunMode::Amr1 ? Combination::ZzGlobal : Combination::LocLocal;
  std::vector<PressureSample> last_profile;
  const AmrResult res = amr_contact_loop(bench, cfg, [&](const AmrSnapshot& s) {
    const std::string id = std::to_string(s.n);
    last_profile = contact_pressure_profile(*s.space, *s.pairing, *s.stress, *s.active);
    write_pressure_csv(out / ("pressure_" + id + ".csv"), last_profile);
    write_partition_csv(out / ("partition_" + id + ".csv"), *s.plan, *s.mesh, *s.pairing);
    if (c.write_vtk)
      write_vtk(out / ("mesh_" + id + ".vtk"), *s.mesh, *s.space, *s.u, *s.stress,
                {leaf_ranks(*s.plan, *s.mesh, *s.space), s.errors->xi});
    std::ostringstream line;
    line << "iteration " << s.n << ": elements " << s.mesh->num_leaves() << ", gamma " << n(s.errors->gamma())
         << ", marked " << s.marked->size() << ", active pairs " << s.active->size();
    trace.push_back(line.str());
    log << line.str() << std::endl;
  });
  write_report_csv(out / "report.csv", res.report);

  const AmrIteration& last = res.report.back();
  const bool amr1 = c.mode == RunMode::Amr1;
  bool respected = true;
  if (last.stop != StopReason::Budget)
    respected = amr1 ? (last.gamma <= cfg.targets.e_global || last.marked == 0) : last.eta <= cfg.targets.delta;
  std::ostringstream s;
  s << "mode: " << to_string(c.mode) << "\niterations: " << res.report.size() << "\nstop: " << to_string(last.stop)
    << "\nelements: " << last.elements << "\ndofs: " << last.dofs << "\ngamma[-]: " << n(last.gamma)
    << "\neta[-]: " << n(last.eta) << "\nmax_level: " << last.max_level << "\nactive_pairs: " << last.active
    << "\ninterpenetration[m]: " << n(last.interpenetration) << "\nk_n[N/m]: " << n(last.k_n);
  if (amr1) s << "\ne_global[-]: " << n(cfg.targets.e_global);
  else s << "\ne_local[-]: " << n(cfg.targets.e_local) << "\ndelta[-]: " << n(cfg.targets.delta);
  s << "\nthreshold_respected: " << (respected ? "yes" : "no") << '\n';
  fit_lines(s, last_profile, c);
  write_text(out / "summary.txt", s.str());
  log << s.str();
}

void run_uniform_mode(const BenchConfig& c, const fs::path& out, std::ostream& log, std::vector<std::string>& trace) {
  const ContactBenchmark bench = make_hertz(c.hertz);
  const double k_n = penalty_of(c, bench, bench.mesh);
  std::vector<std::pair<int, std::vector<PressureSample>>> profiles;
  const auto rows = run_uniform(bench, c.uniform_levels, c.order, k_n, solve_settings(c), [&](const SolvedLevel& s) {
    const std::string id = std::to_string(s.level);
    const PartitionPlan partition = plan(build_regions(s.mesh, s.solve.pairing, contiguous_ranks(s.mesh, c.amr.ranks), c.amr.ranks),
                                         c.amr.ranks, c.amr.c);
    write_partition_csv(out / ("partition_" + id + ".csv"), partition, s.mesh, s.solve.pairing);
    if (!s.profile.empty()) write_pressure_csv(out / ("pressure_" + id + ".csv"), s.profile);
    if (c.write_vtk)
      write_vtk(out / ("mesh_" + id + ".vtk"), s.mesh, s.solve.space, s.solve.contact.u_full, s.stress,
                {leaf_ranks(partition, s.mesh, s.solve.space), {}});
    profiles.emplace_back(s.level, s.profile);
    std::ostringstream line;
    line << "level " << s.level << ": elements " << s.mesh.num_leaves() << ", dofs " << s.solve.dofs.num_conforming()
         << ", active pairs " << s.solve.contact.active.size();
    trace.push_back(line.str());
    log << line.str() << std::endl;
  });
  CsvWriter csv(out / "report.csv", {"level[-]", "elements[-]", "dofs[-]", "h[m]", "contact_sweeps[-]", "pcg_iterations[-]",
                                     "active_pairs[-]", "interpenetration[m]", "hertz_a[m]", "hertz_p_o[Pa]",
                                     "fit_residual[-]"});
  for (const auto& r : rows) {
    csv << r.level << r.elements << r.dofs << r.h << r.sweeps << r.pcg_iterations << r.active << r.interpenetration
        << (r.fitted ? r.fit.a : NAN) << (r.fitted ? r.fit.p_o : NAN) << (r.fitted ? r.fit.residual : NAN);
    csv.end_row();
  }
  std::ostringstream s;
  s << "mode: UNIFORM\norder: " << c.order << "\nlevels: " << rows.size() << "\nk_n[N/m]: " << n(k_n) << '\n';
  for (std::size_t i = 1; i < rows.size(); ++i)
    s << "element_ratio_" << rows[i].level << "[-]: " << n(static_cast<double>(rows[i].elements) / rows[i - 1].elements) << '\n';
  if (!profiles.empty() && !profiles.back().second.empty()) fit_lines(s, profiles.back().second, c);
  write_text(out / "summary.txt", s.str());
  log << s.str();
}

void run_penalty_mode(const BenchConfig& c, const fs::path& out, std::ostream& log) {
  const ContactBenchmark bench = make_hertz(c.hertz);
  PenaltySettings p;
  p.factors = c.penalty_factors;
  p.fixed_level = c.sweep_level;
  p.levels = c.sweep_levels;
  p.reference_factor = c.sweep_reference_factor;
  p.slope_min_factor = c.slope_min_factor;
  p.slope_max_factor = c.slope_max_factor;
  const PenaltyStudy study = run_penalty_study(bench, p, solve_settings(c));
  CsvWriter csv(out / "report.csv", {"series[-]", "level[-]", "h[m]", "k_n_over_e[-]", "k_n[N/m]", "interpenetration[m]",
                                     "interpenetration_over_h[-]", "active_pairs[-]", "contact_sweeps[-]"});
  for (const auto* series : {&study.fixed_mesh, &study.refinement})
    for (const auto& r : *series) {
      csv << std::string(series == &study.fixed_mesh ? "fixed_mesh" : "refinement") << r.level << r.h << r.factor << r.k_n
          << r.interpenetration << r.interpenetration / r.h << r.active << r.sweeps;
      csv.end_row();
    }
  std::ostringstream s;
  s << "mode: PENALTY_SWEEP\nfixed_level: " << c.sweep_level << "\nslope_window[-]: " << n(c.slope_min_factor) << " "
    << n(c.slope_max_factor) << "\ninterpenetration_slope[-]: " << n(study.slope)
    << "\nscaled_interpenetration_variation[-]: " << n(study.scaled_variation) << '\n';
  bool monotone = true;
  for (std::size_t i = 1; i < study.fixed_mesh.size(); ++i)
    if (study.fixed_mesh[i].factor > study.fixed_mesh[i - 1].factor &&
        study.fixed_mesh[i].interpenetration > study.fixed_mesh[i - 1].interpenetration)
      monotone = false;
  s << "monotone_interpenetration: " << (monotone ? "yes" : "no") << '\n';
  write_text(out / "summary.txt", s.str());
  log << s.str();
}

void run_convergence_mode(const BenchConfig& c, const fs::path& out, std::ostream& log, std::vector<std::string>& trace) {
  const ContactBenchmark bench = make_hertz(c.hertz);
  ConvergenceSettings conv;
  conv.q1_levels = c.q1_levels;
  conv.q2_levels = c.q2_levels;
  conv.reference_order = c.reference_order;
  conv.reference_level = c.reference_level;
  conv.penalty_factor = c.amr.penalty.factor;
  conv.amr = c.convergence_amr;
  conv.amr_config = c.amr;
  conv.settings = solve_settings(c);
  const ConvergenceStudy study = run_convergence(bench, conv, [&](const AmrSnapshot& s) {
    trace.push_back("AMR iteration " + std::to_string(s.n) + ": elements " + std::to_string(s.mesh->num_leaves()));
    log << trace.back() << std::endl;
  });
  CsvWriter csv(out / "report.csv", {"series[-]", "order[-]", "level_or_iteration[-]", "h[m]", "dofs[-]",
                                     "energy_error[sqrt(J)]", "relative_error[-]", "gamma[-]"});
  for (const auto& p : study.points) {
    csv << p.series << p.order << p.level << p.h << p.dofs << p.error << p.relative_error << p.gamma;
    csv.end_row();
  }
  std::ostringstream s;
  s << "mode: CONVERGENCE\nreference: Q" << c.reference_order << " level " << c.reference_level << ", "
    << study.reference_dofs << " dofs\nq1_h_slope[-]: " << n(study.q1_h_slope) << "\nq2_h_slope[-]: " << n(study.q2_h_slope)
    << "\nq1_n_slope[-]: " << n(study.q1_n_slope) << '\n';
  if (c.convergence_amr) {
    s << "amr_n_slope[-]: " << n(study.amr_n_slope) << '\n';
    if (study.matched.found)
      s << "matched_error[-]: " << n(study.matched.error) << "\nmatched_uniform_dofs: " << study.matched.uniform_dofs
        << "\nmatched_amr_dofs: " << n(study.matched.amr_dofs) << "\namr_dof_ratio[-]: " << n(study.matched.ratio) << '\n';
    else
      s << "matched_error: none (no uniform error inside the AMR range)\n";
  }
  write_text(out / "summary.txt", s.str());
  log << s.str();
}

}  // namespace

void run_bench(const BenchConfig& config, std::ostream& log) {
  config.validate();
  const fs::path out = config.out_dir;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory '" + out.string() + "'");
  write_text(out / "config.txt", dump(config));
  std::vector<std::string> trace;
  try {
    switch (config.mode) {
      case RunMode::Amr1:
      case RunMode::Amr2: run_amr(config, out, log, trace); break;
      case RunMode::Uniform: run_uniform_mode(config, out, log, trace); break;
      case RunMode::PenaltySweep: run_penalty_mode(config, out, log); break;
      case RunMode::Convergence: run_convergence_mode(config, out, log, trace); break;
    }
  } catch (const SolverError& e) {
    std::ostringstream t;
    t << "solver failure: " << e.what() << "\nresidual: " << n(e.residual()) << "\niterations: " << e.iterations() << '\n';
    for (const auto& line : trace) t << line << '\n';
    write_text(out / "trace.txt", t.str());
    throw;
  }
}

}  // namespace camr
