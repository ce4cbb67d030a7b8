#include "camr/simd/kernels.hpp"

namespace camr::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby_scalar(const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

double diag_scale_dot_scalar(const double* d, const double* r, double* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = d[i] * r[i];
    s += r[i] * z[i];
  }
  return s;
}

void csr_spmv_scalar(std::size_t rows, const std::int64_t* row_ptr, const std::int32_t* col,
                     const double* val, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{dot_scalar, axpy_scalar, xpby_scalar, diag_scale_dot_scalar,
                                 csr_spmv_scalar};
  return table;
}

}  // namespace camr::simd
