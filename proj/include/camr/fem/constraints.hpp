#pragma once

#include <span>
#include <string>
#include <vector>

#include "camr/fem/space.hpp"
#include "camr/fem/sparse.hpp"

namespace camr {

/// P of shape (all DOFs x conforming DOFs): identity on conforming rows, the
/// hanging-node weights on hanging rows (same weights for x and y).
SparseMatrix build_prolongation(const FeSpace& space, const DofMap& dofs);

struct LinearSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

/// (P^T K P, P^T L).
LinearSystem form_conforming(const SparseMatrix& k_full, std::span<const double> l_full,
                             const SparseMatrix& p);

/// Prescribed values on conforming DOFs.
struct DirichletSet {
  std::vector<int> dofs;
  std::vector<double> values;
  std::vector<std::string> warnings;

  void add(int dof, double value);
};

/// Prescribes `component` (0 = x, 1 = y) of every node on edges tagged `tag`.
/// An empty tag adds a warning instead of failing.
void add_dirichlet_on_tag(DirichletSet& set, const FeSpace& space, const DofMap& dofs, int tag,
                          int component, double value);

/// Symmetric elimination of prescribed DOFs.
struct ReducedSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::vector<int> free_dofs;        // reduced index -> conforming DOF
  std::vector<int> to_reduced;       // conforming DOF -> reduced index or -1
  std::vector<double> prescribed;    // conforming-size vector of prescribed values (0 on free DOFs)
  std::vector<std::string> warnings;

  /// Conforming vector from reduced unknowns plus the prescribed values.
  std::vector<double> scatter(std::span<const double> reduced) const;
  /// Free part of a conforming vector.
  std::vector<double> gather(std::span<const double> conforming) const;
};

ReducedSystem apply_dirichlet(const LinearSystem& system, const DirichletSet& dirichlet);

/// Eliminates the same DOFs from an extra symmetric term: returns the reduced
/// block and the right-hand-side correction -A_fc u_c.
LinearSystem reduce_like(const ReducedSystem& reduced, const SparseMatrix& a);

}  // namespace camr
