#include "camr/fem/pcg.hpp"

#include <cmath>
#include <sstream>

#include "camr/common.hpp"
#include "camr/simd/kernels.hpp"

namespace camr {

PcgResult pcg_solve(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0,
                    const PcgOptions& options) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n || (!x0.empty() && x0.size() != n))
    throw MatrixError("PCG dimension mismatch");
  const auto& k = simd::kernels();
  const int max_iter = options.max_iter > 0
                           ? options.max_iter
                           : std::max(1, static_cast<int>(50.0 * std::sqrt(static_cast<double>(n))));

  PcgResult out;
  out.x.assign(n, 0.0);
  if (!x0.empty()) out.x.assign(x0.begin(), x0.end());
  if (n == 0) return out;

  std::vector<double> inv_diag = a.diagonal_values();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(inv_diag[i] > 0.0)) {
      std::ostringstream msg;
      msg << "non-positive diagonal entry at row " << i << "; matrix is not SPD";
      throw MatrixError(msg.str());
    }
    inv_diag[i] = 1.0 / inv_diag[i];
  }

  const double b_norm = std::sqrt(k.dot(b.data(), b.data(), n));
  if (b_norm == 0.0) {
    out.x.assign(n, 0.0);
    return out;
  }
  const double target = options.rel_tol * b_norm;

  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(out.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  if (options.record_history) out.iterates.push_back(out.x);

  double r_norm = std::sqrt(k.dot(r.data(), r.data(), n));
  double rz = k.diag_scale_dot(inv_diag.data(), r.data(), z.data(), n);
  p = z;
  int it = 0;
  while (r_norm > target) {
    if (it >= max_iter) {
      std::ostringstream msg;
      msg << "PCG did not converge in " << max_iter << " iterations (relative residual "
          << r_norm / b_norm << ")";
      throw SolverError(msg.str(), r_norm / b_norm, it);
    }
    a.multiply(p, q);
    const double pq = k.dot(p.data(), q.data(), n);
    if (!(pq > 0.0)) throw MatrixError("p^T A p <= 0 in PCG; matrix is not SPD");
    const double alpha = rz / pq;
    k.axpy(alpha, p.data(), out.x.data(), n);
    k.axpy(-alpha, q.data(), r.data(), n);
    const double rz_next = k.diag_scale_dot(inv_diag.data(), r.data(), z.data(), n);
    k.xpby(z.data(), rz_next / rz, p.data(), n);
    rz = rz_next;
    r_norm = std::sqrt(k.dot(r.data(), r.data(), n));
    ++it;
    if (options.record_history) out.iterates.push_back(out.x);
    // Guard against drift of the recursive residual before declaring success.
    if (r_norm <= target) {
      a.multiply(out.x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
      r_norm = std::sqrt(k.dot(r.data(), r.data(), n));
      if (r_norm > target) {
        rz = k.diag_scale_dot(inv_diag.data(), r.data(), z.data(), n);
        p = z;
      }
    }
  }
  out.iterations = it;
  out.relative_residual = r_norm / b_norm;
  return out;
}

}  // namespace camr
