#include "camr/fem/constraints.hpp"

#include <algorithm>

namespace camr {

SparseMatrix build_prolongation(const FeSpace& space, const DofMap& dofs) {
  if (dofs.num_full() != space.num_dofs()) throw InternalError("DOF map does not match the space");
  std::vector<const HangingConstraint*> by_slave(space.num_nodes(), nullptr);
  for (const auto& c : space.constraints()) {
    if (c.slave < 0 || static_cast<std::size_t>(c.slave) >= space.num_nodes())
      throw InternalError("constraint references unknown node " + std::to_string(c.slave));
    by_slave[static_cast<std::size_t>(c.slave)] = &c;
  }
  TripletBuilder b(dofs.num_full(), dofs.num_conforming());
  for (std::size_t d = 0; d < dofs.num_full(); ++d) {
    const int conf = dofs.full_to_conforming[d];
    if (conf >= 0) {
      b.add(static_cast<int>(d), conf, 1.0);
      continue;
    }
    const HangingConstraint* c = by_slave[d / 2];
    if (c == nullptr) throw InternalError("hanging DOF without a constraint");
    for (std::size_t m = 0; m < c->masters.size(); ++m) {
      const int master = c->masters[m];
      if (master < 0 || static_cast<std::size_t>(master) >= space.num_nodes())
        throw InternalError("constraint references unknown node " + std::to_string(master));
      const int mc = dofs.full_to_conforming[2 * static_cast<std::size_t>(master) + d % 2];
      if (mc < 0) throw InternalError("constraint master is itself hanging");
      b.add(static_cast<int>(d), mc, c->weights[m]);
    }
  }
  return b.build();
}

LinearSystem form_conforming(const SparseMatrix& k_full, std::span<const double> l_full,
                             const SparseMatrix& p) {
  if (k_full.rows() != p.rows() || l_full.size() != p.rows())
    throw MatrixError("conforming restriction dimension mismatch");
  return {congruence(k_full, p), p.multiply_transpose(l_full)};
}

void DirichletSet::add(int dof, double value) {
  dofs.push_back(dof);
  values.push_back(value);
}

void add_dirichlet_on_tag(DirichletSet& set, const FeSpace& space, const DofMap& dofs, int tag,
                          int component, double value) {
  const auto nodes = space.nodes_on_tag(tag);
  if (nodes.empty()) {
    set.warnings.push_back("Dirichlet tag " + std::to_string(tag) + " selects no DOFs");
    return;
  }
  for (int n : nodes) {
    const int c = dofs.full_to_conforming[2 * static_cast<std::size_t>(n) + static_cast<std::size_t>(component)];
    if (c < 0) throw InternalError("Dirichlet DOF is hanging");
    set.add(c, value);
  }
}

std::vector<double> ReducedSystem::scatter(std::span<const double> reduced) const {
  std::vector<double> out = prescribed;
  for (std::size_t i = 0; i < free_dofs.size(); ++i) out[static_cast<std::size_t>(free_dofs[i])] = reduced[i];
  return out;
}

std::vector<double> ReducedSystem::gather(std::span<const double> conforming) const {
  std::vector<double> out(free_dofs.size());
  for (std::size_t i = 0; i < free_dofs.size(); ++i) out[i] = conforming[static_cast<std::size_t>(free_dofs[i])];
  return out;
}

namespace {

// Keeps free rows/columns of `a` and returns -A_fc u_c alongside.
LinearSystem eliminate(const SparseMatrix& a, const std::vector<int>& to_reduced,
                       const std::vector<int>& free_dofs, const std::vector<double>& prescribed) {
  std::vector<std::int64_t> ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;
  std::vector<double> correction(free_dofs.size(), 0.0);
  for (std::size_t r = 0; r < free_dofs.size(); ++r) {
    const auto row = static_cast<std::size_t>(free_dofs[r]);
    for (auto k = a.row_ptr()[row]; k < a.row_ptr()[row + 1]; ++k) {
      const auto c = static_cast<std::size_t>(a.col()[static_cast<std::size_t>(k)]);
      const double v = a.values()[static_cast<std::size_t>(k)];
      const int rc = to_reduced[c];
      if (rc >= 0) {
        col.push_back(rc);
        val.push_back(v);
      } else {
        correction[r] -= v * prescribed[c];
      }
    }
    ptr.push_back(static_cast<std::int64_t>(col.size()));
  }
  // Reduced indices are increasing in the conforming index, so rows stay sorted.
  return {SparseMatrix(free_dofs.size(), free_dofs.size(), std::move(ptr), std::move(col), std::move(val)),
          std::move(correction)};
}

}  // namespace

ReducedSystem apply_dirichlet(const LinearSystem& system, const DirichletSet& dirichlet) {
  const std::size_t n = system.matrix.rows();
  if (system.matrix.cols() != n || system.rhs.size() != n)
    throw MatrixError("Dirichlet elimination needs a square system");
  ReducedSystem out;
  out.warnings = dirichlet.warnings;
  out.prescribed.assign(n, 0.0);
  std::vector<char> fixed(n, 0);
  for (std::size_t i = 0; i < dirichlet.dofs.size(); ++i) {
    const int d = dirichlet.dofs[i];
    if (d < 0 || static_cast<std::size_t>(d) >= n) throw ConfigError("Dirichlet DOF out of range");
    fixed[static_cast<std::size_t>(d)] = 1;
    out.prescribed[static_cast<std::size_t>(d)] = dirichlet.values[i];
  }
  out.to_reduced.assign(n, -1);
  for (std::size_t d = 0; d < n; ++d)
    if (!fixed[d]) {
      out.to_reduced[d] = static_cast<int>(out.free_dofs.size());
      out.free_dofs.push_back(static_cast<int>(d));
    }
  LinearSystem r = eliminate(system.matrix, out.to_reduced, out.free_dofs, out.prescribed);
  out.matrix = std::move(r.matrix);
  out.rhs = std::move(r.rhs);
  for (std::size_t i = 0; i < out.free_dofs.size(); ++i)
    out.rhs[i] += system.rhs[static_cast<std::size_t>(out.free_dofs[i])];
  return out;
}

LinearSystem reduce_like(const ReducedSystem& reduced, const SparseMatrix& a) {
  if (a.rows() != reduced.to_reduced.size() || a.cols() != a.rows())
    throw MatrixError("reduction dimension mismatch");
  return eliminate(a, reduced.to_reduced, reduced.free_dofs, reduced.prescribed);
}

}  // namespace camr
