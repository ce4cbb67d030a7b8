#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "camr/contact/contact.hpp"
#include "camr/fem/elasticity.hpp"

namespace camr {

/// Nodal recovered stress: per node, the area-weighted mean of the Gauss
/// values of its adjacent leaves extrapolated to that node. Solids never share
/// nodes, so each solid is recovered on its own. Hanging nodes take the
/// weighted mean of their masters. Q1 only.
std::vector<Voigt> recover_stress(const Mesh& mesh, const FeSpace& space, std::span<const double> u,
                                  const MaterialTable& materials);

/// Raw stress at the 2x2 Gauss points of one leaf, in tensor order.
std::array<Voigt, 4> gauss_stress(const Mesh& mesh, const FeSpace& space, std::size_t leaf,
                                  std::span<const double> u, const MaterialTable& materials);

/// Element errors and energies, indexed like space.leaves().
struct ErrorField {
  std::vector<int> elements;
  std::vector<double> xi;
  std::vector<double> omega;
  double xi_global = 0.0;
  double omega_global = 0.0;

  double gamma() const { return omega_global > 0.0 ? xi_global / omega_global : 0.0; }
};

ErrorField element_errors(const Mesh& mesh, const FeSpace& space, std::span<const double> u,
                          std::span<const Voigt> recovered, const MaterialTable& materials);

enum class Combination { ZzGlobal, LocLocal };

struct AmrTargets {
  Combination combination = Combination::ZzGlobal;
  double e_global = 0.02;  // e_Omega
  double e_local = 0.05;   // e_Omega,LOC
  double delta = 0.001;
  int n_max = 10;

  void validate() const;
};

/// Per-element admissible error.
std::vector<double> thresholds(const ErrorField& errors, const AmrTargets& targets);

/// Elements above threshold, plus the contact partners of marked contact elements.
std::set<int> mark(const ErrorField& errors, std::span<const double> thresholds,
                   const ContactPairing* pairing);

enum class StopReason { None, Target, EmptyMarking, LocalArea, Budget };
std::string to_string(StopReason r);

struct StopDecision {
  bool stop = false;
  StopReason reason = StopReason::None;
  double eta = 0.0;  // marked area / total area
};

/// `iteration` counts from 1; reaching n_max always stops.
StopDecision should_stop(const ErrorField& errors, const std::set<int>& marked, const Mesh& mesh,
                         const AmrTargets& targets, int iteration);

}  // namespace camr
