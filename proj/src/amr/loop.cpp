#include "camr/amr/loop.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <sstream>

#include "camr/fem/transfer.hpp"

namespace camr {

double penalty_coefficient(const PenaltyRule& rule, const Mesh& mesh, const MaterialTable& materials) {
  const double e = materials.of(1).young_modulus;
  if (!rule.inverse_h_min) {
    if (!(rule.factor > 0.0)) throw ConfigError("penalty factor must be positive");
    return rule.factor * e;
  }
  double h_min = std::numeric_limits<double>::infinity();
  for (int leaf : mesh.leaves()) h_min = std::min(h_min, mesh.element_diameter(leaf));
  return e / h_min;
}

std::set<int> refinement_closure(const Mesh& mesh, const std::set<int>& marked, const ContactPairing& pairing) {
  std::set<int> target = marked;
  for (;;) {
    std::set<int> next = mesh.two_to_one_closure(target);
    std::vector<int> partners;
    for (int e : next)
      if (int p = pairing.partner(e); p >= 0) partners.push_back(p);
    next.insert(partners.begin(), partners.end());
    if (next.size() == target.size()) return next;
    target = std::move(next);
  }
}

FixedSolve solve_on_mesh(const ContactBenchmark& problem, const Mesh& mesh, int order, double k_n,
                         int l_max, const PcgOptions& pcg, std::span<const double> initial_guess,
                         const ActiveSet& initial_active) {
  FeSpace space(mesh, order);
  DofMap dofs = build_dofmap(space);
  SparseMatrix p = build_prolongation(space, dofs);
  auto sys = assemble_stiffness(mesh, space, problem.materials);
  ContactProblem cp{form_conforming(sys.stiffness, sys.load, p), p, problem.dirichlet(space, dofs), nullptr};
  ContactPairing pairing = pair_nodes(mesh, space, problem.tag1, problem.tag2, problem.normal);
  cp.pairing = &pairing;
  PenaltyConfig pen{k_n, l_max, initial_active, pcg};
  ContactResult res = solve_contact(cp, pen, initial_guess);
  return {std::move(space), std::move(dofs), std::move(p), std::move(pairing), std::move(res), k_n};
}

AmrResult amr_contact_loop(const ContactBenchmark& problem, const AmrConfig& config, const AmrObserver& observer) {
  config.targets.validate();
  if (config.ranks < 1) throw ConfigError("rank count must be positive");
  if (!problem.dirichlet) throw ConfigError("benchmark has no Dirichlet data");

  AmrResult out;
  Mesh mesh = problem.mesh;
  std::vector<int> rank_of = contiguous_ranks(mesh, config.ranks);

  // State carried from the previous iteration for warm starts.
  std::unique_ptr<Mesh> prev_mesh;
  std::unique_ptr<FeSpace> prev_space;
  std::vector<double> prev_u;
  std::set<int> prev_active_nodes;

  for (int n = 1;; ++n) {
    const double k_n = penalty_coefficient(config.penalty, mesh, problem.materials);
    FeSpace space(mesh, 1);
    DofMap dofs = build_dofmap(space);
    SparseMatrix p = build_prolongation(space, dofs);
    ContactPairing pairing = pair_nodes(mesh, space, problem.tag1, problem.tag2, problem.normal);

    const PartitionPlan partition = plan(build_regions(mesh, pairing, rank_of, config.ranks), config.ranks, config.c);
    const ValidationReport check = validate(partition, pairing, mesh);
    rank_of = partition.rank_table(mesh.num_elements());

    std::vector<double> guess;
    ActiveSet initial_active;
    if (prev_mesh) {
      const auto full = interpolate(*prev_mesh, *prev_space, prev_u, space);
      guess.resize(dofs.num_conforming());
      for (std::size_t i = 0; i < guess.size(); ++i)
        guess[i] = full[static_cast<std::size_t>(dofs.conforming_to_full[i])];
      for (std::size_t i = 0; i < pairing.size(); ++i)
        if (prev_active_nodes.count(pairing.pairs[i].first)) initial_active.push_back(static_cast<int>(i));
    }

    auto sys = assemble_stiffness(mesh, space, problem.materials);
    ContactProblem cp{form_conforming(sys.stiffness, sys.load, p), p, problem.dirichlet(space, dofs), &pairing};
    ContactResult contact = solve_contact(cp, {k_n, config.l_max, initial_active, config.pcg}, guess);
    if (!contact.converged) {
      std::ostringstream msg;
      msg << "contact loop did not reach a fixed point at AMR iteration " << n << "; active sizes:";
      for (const auto& s : contact.trace) msg << ' ' << s.active_size;
      throw SolverError(msg.str(), 0.0, contact.pcg_iterations);
    }

    const auto stress = recover_stress(mesh, space, contact.u_full, problem.materials);
    ErrorField errors = element_errors(mesh, space, contact.u_full, stress, problem.materials);
    const auto limits = thresholds(errors, config.targets);
    const std::set<int> marked = mark(errors, limits, &pairing);
    const StopDecision stop = should_stop(errors, marked, mesh, config.targets, n);

    AmrIteration row;
    row.n = n;
    row.elements = space.num_elements();
    row.dofs = dofs.num_conforming();
    row.gamma = errors.gamma();
    row.eta = stop.eta;
    row.marked = marked.size();
    row.contact_sweeps = static_cast<int>(contact.trace.size());
    row.pcg_iterations = contact.pcg_iterations;
    row.active = contact.active.size();
    row.k_n = k_n;
    row.interpenetration = interpenetration(pairing.b, pairing.gaps, contact.u_full);
    row.xi_global = errors.xi_global;
    row.omega_global = errors.omega_global;
    row.max_level = mesh.max_level();
    row.stop = stop.reason;
    row.anti_cycling = std::any_of(contact.trace.begin(), contact.trace.end(),
                                   [](const ContactSweep& s) { return s.anti_cycling; });
    row.contact_ranks = partition.contact_ranks;
    row.imbalance = check.imbalance;
    row.colocation_violations = check.colocation_violations;
    row.separation_violations = check.separation_violations;
    out.report.push_back(row);

    if (observer) {
      AmrSnapshot snap{n, &mesh, &space, &contact.u_full, &stress, &errors, &pairing, &contact.active, &partition, &marked};
      observer(snap);
    }

    if (stop.stop) {
      out.u = std::move(contact.u_full);
      out.active = std::move(contact.active);
      out.errors = std::move(errors);
      out.mesh = std::move(mesh);
      return out;
    }

    const std::set<int> target = refinement_closure(mesh, marked, pairing);
    prev_active_nodes.clear();
    for (int i : contact.active) prev_active_nodes.insert(pairing.pairs[static_cast<std::size_t>(i)].first);
    prev_mesh = std::make_unique<Mesh>(mesh);
    prev_space = std::make_unique<FeSpace>(std::move(space));
    prev_u = std::move(contact.u_full);

    mesh.refine_in_place(target);
    // Children inherit their parent's rank.
    rank_of.resize(mesh.num_elements(), -1);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
      if (rank_of[e] < 0) rank_of[e] = rank_of[static_cast<std::size_t>(mesh.element(static_cast<int>(e)).parent)];
  }
}

}  // namespace camr
