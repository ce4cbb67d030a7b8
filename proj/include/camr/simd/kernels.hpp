#pragma once

// Vector and CSR kernels used by the iterative solver.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The variant is picked once at runtime from CPUID; the
// environment variable CAMR_ISA=scalar forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace camr::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = x + b * y
  void (*xpby)(const double* x, double b, double* y, std::size_t n);
  // z = d .* r, returns dot(r, z)
  double (*diag_scale_dot)(const double* d, const double* r, double* z, std::size_t n);
  // y = A x for a CSR matrix
  void (*csr_spmv)(std::size_t rows, const std::int64_t* row_ptr, const std::int32_t* col,
                   const double* val, const double* x, double* y);
};

const KernelTable& scalar_kernels();
// Null when the build has no AVX2 translation unit.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);
Isa active_isa();
std::string_view isa_name(Isa isa);
const KernelTable& kernels(Isa isa);
const KernelTable& kernels();

// Convenience wrappers over the active table.
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double b, std::span<double> y);
double diag_scale_dot(std::span<const double> d, std::span<const double> r, std::span<double> z);

}  // namespace camr::simd
