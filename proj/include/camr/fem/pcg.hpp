#pragma once

#include <span>
#include <vector>

#include "camr/fem/sparse.hpp"

namespace camr {

struct PcgOptions {
  double rel_tol = 1e-10;
  /// 0 selects 50 * sqrt(N).
  int max_iter = 0;
  bool record_history = false;
};

struct PcgResult {
  std::vector<double> x;
  int iterations = 0;
  /// ||b - A x|| / ||b|| recomputed from the returned x.
  double relative_residual = 0.0;
  /// Iterates x_0, x_1, ... when record_history is set.
  std::vector<std::vector<double>> iterates;
};

/// Jacobi-preconditioned conjugate gradients. Throws MatrixError when the
/// matrix is detected not to be SPD and SolverError on non-convergence.
PcgResult pcg_solve(const SparseMatrix& a, std::span<const double> b,
                    std::span<const double> x0 = {}, const PcgOptions& options = {});

}  // namespace camr
