#include <random>
#include <vector>

#include "camr/simd/kernels.hpp"
#include "doctest.h"

using namespace camr::simd;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

}  // namespace

TEST_CASE("avx2 kernels match the scalar reference") {
  if (!cpu_supports(Isa::Avx2)) {
    MESSAGE("AVX2 unavailable, skipping");
    return;
  }
  const KernelTable& s = kernels(Isa::Scalar);
  const KernelTable& v = kernels(Isa::Avx2);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 31u, 1000u, 1003u}) {
    CAPTURE(n);
    auto x = random_vector(n, 1);
    auto y = random_vector(n, 2);
    const double ds = s.dot(x.data(), y.data(), n);
    const double dv = v.dot(x.data(), y.data(), n);
    CHECK(dv == doctest::Approx(ds).epsilon(1e-13));

    auto ys = y, yv = y;
    s.axpy(0.37, x.data(), ys.data(), n);
    v.axpy(0.37, x.data(), yv.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-15));

    ys = y;
    yv = y;
    s.xpby(x.data(), -1.3, ys.data(), n);
    v.xpby(x.data(), -1.3, yv.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-15));

    std::vector<double> zs(n), zv(n);
    const double rs = s.diag_scale_dot(x.data(), y.data(), zs.data(), n);
    const double rv = v.diag_scale_dot(x.data(), y.data(), zv.data(), n);
    CHECK(rv == doctest::Approx(rs).epsilon(1e-13));
    for (std::size_t i = 0; i < n; ++i) CHECK(zv[i] == zs[i]);
  }
}

TEST_CASE("csr spmv agrees across isas on an irregular pattern") {
  if (!cpu_supports(Isa::Avx2)) return;
  std::mt19937 gen(7);
  const int rows = 57;
  std::vector<std::int64_t> ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;
  std::uniform_int_distribution<int> len(0, 13), pick(0, rows - 1);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int r = 0; r < rows; ++r) {
    const int k = len(gen);
    for (int j = 0; j < k; ++j) {
      col.push_back(pick(gen));
      val.push_back(dist(gen));
    }
    ptr.push_back(static_cast<std::int64_t>(col.size()));
  }
  auto x = random_vector(rows, 3);
  std::vector<double> ys(rows), yv(rows);
  kernels(Isa::Scalar).csr_spmv(rows, ptr.data(), col.data(), val.data(), x.data(), ys.data());
  kernels(Isa::Avx2).csr_spmv(rows, ptr.data(), col.data(), val.data(), x.data(), yv.data());
  for (int i = 0; i < rows; ++i) CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-13));
}

TEST_CASE("scalar is always available") {
  CHECK(isa_name(Isa::Scalar) == "scalar");
  CHECK(kernels(Isa::Scalar).dot != nullptr);
}
