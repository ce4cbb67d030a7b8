#pragma once

#include <functional>
#include <set>
#include <vector>

#include "camr/amr/estimator.hpp"
#include "camr/partition/partition.hpp"

namespace camr {

/// A two-body contact problem on a refinable mesh.
struct ContactBenchmark {
  Mesh mesh{1};
  MaterialTable materials;
  Vec2 normal{0.0, 1.0};
  int tag1 = tags::kContact1;
  int tag2 = tags::kContact2;
  /// Prescribed conforming DOFs for a given discretization.
  std::function<DirichletSet(const FeSpace&, const DofMap&)> dirichlet;
};

struct PenaltyRule {
  /// k_N = factor * E, or E / h_min when inverse_h_min is set (E of solid 1).
  double factor = 1e4;
  bool inverse_h_min = false;
};

double penalty_coefficient(const PenaltyRule& rule, const Mesh& mesh, const MaterialTable& materials);

struct AmrConfig {
  AmrTargets targets;
  PenaltyRule penalty;
  int l_max = 10;
  PcgOptions pcg{.rel_tol = 1e-12};
  int ranks = 8;
  double c = 1.0;
};

/// One row of the iteration report.
struct AmrIteration {
  int n = 0;
  std::size_t elements = 0;          // N_E (leaves)
  std::size_t dofs = 0;              // conforming DOFs
  double gamma = 0.0;
  double eta = 0.0;
  std::size_t marked = 0;
  int contact_sweeps = 0;
  int pcg_iterations = 0;
  std::size_t active = 0;
  double k_n = 0.0;
  double interpenetration = 0.0;
  double xi_global = 0.0;
  double omega_global = 0.0;
  int max_level = 0;
  StopReason stop = StopReason::None;
  bool anti_cycling = false;
  int contact_ranks = 0;
  double imbalance = 0.0;
  int colocation_violations = 0;
  int separation_violations = 0;
};

/// Everything known about one solved mesh; handed to the observer.
struct AmrSnapshot {
  int n = 0;
  const Mesh* mesh = nullptr;
  const FeSpace* space = nullptr;
  const std::vector<double>* u = nullptr;  // all DOFs
  const std::vector<Voigt>* stress = nullptr;
  const ErrorField* errors = nullptr;
  const ContactPairing* pairing = nullptr;
  const ActiveSet* active = nullptr;
  const PartitionPlan* plan = nullptr;
  const std::set<int>* marked = nullptr;
};

struct AmrResult {
  Mesh mesh{1};
  std::vector<double> u;
  ActiveSet active;
  ErrorField errors;
  std::vector<AmrIteration> report;
};

using AmrObserver = std::function<void(const AmrSnapshot&)>;

/// Solve, estimate, mark, stop-check, refine (marked set closed under the
/// 2:1 rule and contact pairing), re-pair and re-plan, until a stop criterion.
/// Throws SolverError when the contact loop does not converge.
AmrResult amr_contact_loop(const ContactBenchmark& problem, const AmrConfig& config,
                           const AmrObserver& observer = {});

/// Refinement set: `marked` closed under the 2:1 rule and element pairing.
std::set<int> refinement_closure(const Mesh& mesh, const std::set<int>& marked, const ContactPairing& pairing);

/// Single solve on a fixed mesh (no estimation), used by uniform studies.
struct FixedSolve {
  FeSpace space;
  DofMap dofs;
  SparseMatrix prolongation;
  ContactPairing pairing;
  ContactResult contact;
  double k_n = 0.0;
};

FixedSolve solve_on_mesh(const ContactBenchmark& problem, const Mesh& mesh, int order, double k_n,
                         int l_max, const PcgOptions& pcg, std::span<const double> initial_guess = {},
                         const ActiveSet& initial_active = {});

}  // namespace camr
