#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "camr/fem/constraints.hpp"
#include "camr/fem/pcg.hpp"
#include "camr/fem/space.hpp"

namespace camr {

/// Node-to-node pairing across the contact interface.
///
/// Row i of `b` measures n . (u1 - u2) for pair i, so pair i is in contact
/// when (b u)_i >= gaps[i].
struct ContactPairing {
  Vec2 normal;                              // from solid 1 into solid 2
  std::vector<std::pair<int, int>> pairs;   // (solid-1 node, solid-2 node), ascending transverse coordinate
  std::vector<double> gaps;                 // (x2 - x1) . n
  SparseMatrix b;                           // pairs x all DOFs
  std::vector<std::pair<int, int>> element_pairs;  // (solid-1 leaf, solid-2 leaf)

  std::size_t size() const { return pairs.size(); }
  /// Paired contact element, or -1 for elements off the interface.
  int partner(int element) const;

  std::unordered_map<int, int> partner_of;
};

/// Pairs each tag1 node with the tag2 node nearest along `normal`. Throws
/// PairingError when the interfaces do not match (transverse offset above
/// `tolerance`, or the match is not a bijection).
ContactPairing pair_nodes(const Mesh& mesh, const FeSpace& space, int tag1, int tag2, Vec2 normal,
                          double tolerance = 1e-8);

using ActiveSet = std::vector<int>;

/// {i : (B u)_i >= D_i}, ascending.
ActiveSet active_set(const SparseMatrix& b, std::span<const double> gaps, std::span<const double> u);

struct ProjectedContact {
  SparseMatrix b_hat;  // B[A] P
  std::vector<double> d_hat;
};

ProjectedContact restrict_and_project(const SparseMatrix& b, std::span<const double> gaps,
                                      const ActiveSet& active, const SparseMatrix& p);

/// (K + kN B^T B) u = L + kN B^T D.
LinearSystem form_penalized(const LinearSystem& elastic, const ProjectedContact& contact, double k_n);

/// max(0, max_i ((B u)_i - D_i)).
double interpenetration(const SparseMatrix& b, std::span<const double> gaps, std::span<const double> u);

struct PenaltyConfig {
  double k_n = 0.0;
  int l_max = 10;
  ActiveSet initial_active;
  PcgOptions pcg;
};

struct ContactSweep {
  std::size_t active_size = 0;
  int pcg_iterations = 0;
  bool anti_cycling = false;
};

struct ContactResult {
  std::vector<double> u_conforming;
  std::vector<double> u_full;
  ActiveSet active;
  bool converged = false;
  std::vector<ContactSweep> trace;
  int pcg_iterations = 0;
};

/// Inputs of the contact loop on one mesh.
struct ContactProblem {
  LinearSystem elastic;        // conforming P^T K P, P^T L
  SparseMatrix prolongation;   // P
  DirichletSet dirichlet;      // on conforming DOFs
  const ContactPairing* pairing = nullptr;
};

/// Active-set fixed-point iteration. `initial_guess` (conforming DOFs) warm
/// starts the first PCG solve. Never throws on l_max; check `converged`.
ContactResult solve_contact(const ContactProblem& problem, const PenaltyConfig& config,
                            std::span<const double> initial_guess = {});

struct PressureSample {
  double s = 0.0;   // signed arc distance from the contact center
  double r = 0.0;   // |s|
  double p = 0.0;   // positive in compression
  bool active = false;
  int pair = -1;
};

/// Normal pressure -(sigma n).n from nodal stresses, averaged over each pair,
/// ordered along the interface. The origin is the midpoint of the active extent.
std::vector<PressureSample> contact_pressure_profile(const FeSpace& space, const ContactPairing& pairing,
                                                     std::span<const Voigt> nodal_stress,
                                                     const ActiveSet& active);

}  // namespace camr
