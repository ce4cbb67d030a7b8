#pragma once

// Fixed-mesh studies on a contact benchmark: uniform refinement series,
// penalty sweeps, graded reference solutions and convergence against them.

#include <functional>
#include <string>
#include <vector>

#include "camr/bench/hertz.hpp"

namespace camr {

struct SolveSettings {
  int l_max = 10;
  PcgOptions pcg{.rel_tol = 1e-12};
};

/// Largest leaf diameter.
double mesh_size(const Mesh& mesh);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Solves, recovers the stress (Q1) and fits the Hertz law; the fit is left
/// empty when the profile carries no compression.
struct SolvedLevel {
  int level = 0;
  Mesh mesh{1};
  FixedSolve solve;
  std::vector<Voigt> stress;  // empty for Q2
  std::vector<PressureSample> profile;
  bool fitted = false;
  HertzFit fit;
};

SolvedLevel solve_level(const ContactBenchmark& problem, Mesh mesh, int level, int order, double k_n,
                        const SolveSettings& settings);

struct UniformLevel {
  int level = 0;
  std::size_t elements = 0;
  std::size_t dofs = 0;
  double h = 0.0;
  int sweeps = 0;
  int pcg_iterations = 0;
  std::size_t active = 0;
  double interpenetration = 0.0;
  bool fitted = false;
  HertzFit fit;
};

using LevelObserver = std::function<void(const SolvedLevel&)>;

std::vector<UniformLevel> run_uniform(const ContactBenchmark& problem, int levels, int order, double k_n,
                                      const SolveSettings& settings, const LevelObserver& observer = {});

struct PenaltyPoint {
  int level = 0;
  double h = 0.0;
  double factor = 0.0;  // k_N / E
  double k_n = 0.0;
  double interpenetration = 0.0;
  std::size_t active = 0;
  int sweeps = 0;
};

struct PenaltyStudy {
  std::vector<PenaltyPoint> fixed_mesh;  // one mesh, every factor
  std::vector<PenaltyPoint> refinement;  // one factor, successive levels
  double slope = 0.0;                    // d log(interpenetration) / d log(k_N) over the slope window
  /// Largest |s_{i+1}/s_i - 1| for s = interpenetration / h over successive levels.
  double scaled_variation = 0.0;
};

struct PenaltySettings {
  std::vector<double> factors{1.0, 10.0, 1e2, 1e4, 1e6};
  int fixed_level = 2;
  std::vector<int> levels{1, 2, 3};
  double reference_factor = 1e4;
  double slope_min_factor = 1e2;
  double slope_max_factor = 1e6;
};

PenaltyStudy run_penalty_study(const ContactBenchmark& problem, const PenaltySettings& penalty,
                               const SolveSettings& settings);

/// Uniform refinement to base_level, then repeated refinement of the leaves
/// whose center lies within `radius` of any of `centers`, up to top_level.
Mesh graded_mesh(const Mesh& roots, std::span<const Vec2> centers, int base_level, int top_level, double radius);

struct GradedReference {
  int base_level = 3;
  int top_level = 7;
  double radius = 0.4;
  double penalty_factor = 1e4;
  SolveSettings settings{10, PcgOptions{.rel_tol = 1e-13}};
};

/// Fine Q1 solution of the half-disk pair graded toward the first contact
/// points (the arc apexes), with its pressure profile and Hertz fit.
SolvedLevel hertz_reference(const HertzParams& params, const GradedReference& graded);

struct ConvergencePoint {
  std::string series;  // "uniform" or "amr"
  int order = 1;
  int level = 0;       // uniform level, or AMR iteration
  double h = 0.0;
  std::size_t dofs = 0;
  double error = 0.0;  // energy norm of u_h - u_ref
  double relative_error = 0.0;
  double gamma = 0.0;  // estimated relative error (AMR only)
};

struct MatchedError {
  bool found = false;
  double error = 0.0;  // the finest uniform Q1 error the AMR run also reaches
  std::size_t uniform_dofs = 0;
  double amr_dofs = 0.0;  // log-log interpolated along the AMR iterates
  double ratio = 0.0;     // amr_dofs / uniform_dofs
};

/// DOFs the AMR sequence needs to reach the finest uniform error it attains.
MatchedError matched_error(std::span<const ConvergencePoint> uniform, std::span<const ConvergencePoint> amr);

struct ConvergenceSettings {
  std::vector<int> q1_levels{1, 2, 3, 4};
  std::vector<int> q2_levels{1, 2};
  int reference_order = 2;
  int reference_level = 4;
  double penalty_factor = 1e4;
  bool amr = true;
  AmrConfig amr_config;
  SolveSettings settings;
  PcgOptions reference_pcg{.rel_tol = 1e-13};

  /// The reference must be at least two levels finer than same-order study
  /// meshes and no coarser than any study mesh. Throws ConfigError.
  void validate() const;
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;
  std::size_t reference_dofs = 0;
  double q1_h_slope = 0.0;
  double q2_h_slope = 0.0;
  double q1_n_slope = 0.0;   // magnitude of d log(error) / d log(N)
  double amr_n_slope = 0.0;  // same, over all AMR iterates
  MatchedError matched;

  std::vector<ConvergencePoint> series(const std::string& name, int order) const;
};

ConvergenceStudy run_convergence(const ContactBenchmark& problem, const ConvergenceSettings& convergence,
                                 const AmrObserver& amr_observer = {});

}  // namespace camr
