#include <cassert>
#include <cstdlib>
#include <string>

#include "camr/simd/kernels.hpp"

namespace camr::simd {

#ifndef CAMR_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(CAMR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa isa = [] {
    if (const char* env = std::getenv("CAMR_ISA"); env && std::string(env) == "scalar")
      return Isa::Scalar;
    return cpu_supports(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels(Isa isa) {
  if (isa == Isa::Avx2 && cpu_supports(Isa::Avx2)) return *avx2_kernels();
  return scalar_kernels();
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels(active_isa());
  return table;
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return kernels().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  kernels().axpy(a, x.data(), y.data(), x.size());
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  assert(x.size() == y.size());
  kernels().xpby(x.data(), b, y.data(), x.size());
}

double diag_scale_dot(std::span<const double> d, std::span<const double> r, std::span<double> z) {
  assert(d.size() == r.size() && r.size() == z.size());
  return kernels().diag_scale_dot(d.data(), r.data(), z.data(), r.size());
}

}  // namespace camr::simd
