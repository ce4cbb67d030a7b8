#include "camr/fem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "camr/common.hpp"
#include "camr/simd/kernels.hpp"

namespace camr {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> row_ptr,
                           std::vector<std::int32_t> col, std::vector<double> val)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_(std::move(col)),
      val_(std::move(val)) {
  if (row_ptr_.size() != rows_ + 1 || col_.size() != val_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != val_.size())
    throw MatrixError("inconsistent CSR arrays");
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<double> d(n, 1.0);
  return diagonal(d);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const std::size_t n = d.size();
  std::vector<std::int64_t> ptr(n + 1);
  std::vector<std::int32_t> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    ptr[i + 1] = static_cast<std::int64_t>(i + 1);
    col[i] = static_cast<std::int32_t>(i);
  }
  return {n, n, std::move(ptr), std::move(col), {d.begin(), d.end()}};
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto b = col_.begin() + row_ptr_[i];
  const auto e = col_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(b, e, static_cast<std::int32_t>(j));
  return (it != e && *it == static_cast<std::int32_t>(j)) ? val_[static_cast<std::size_t>(it - col_.begin())]
                                                          : 0.0;
}

std::vector<double> SparseMatrix::diagonal_values() const {
  std::vector<double> d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : val_) m = std::max(m, std::abs(v));
  return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw MatrixError("spmv dimension mismatch");
  if (rows_ == 0) return;
  simd::kernels().csr_spmv(rows_, row_ptr_.data(), col_.data(), val_.data(), x.data(), y.data());
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  if (x.size() != rows_) throw MatrixError("transpose spmv dimension mismatch");
  std::vector<double> y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      y[static_cast<std::size_t>(col_[static_cast<std::size_t>(k)])] +=
          val_[static_cast<std::size_t>(k)] * x[i];
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::int64_t> ptr(cols_ + 1, 0);
  for (auto c : col_) ++ptr[static_cast<std::size_t>(c) + 1];
  for (std::size_t j = 0; j < cols_; ++j) ptr[j + 1] += ptr[j];
  std::vector<std::int64_t> fill(ptr.begin(), ptr.end() - 1);
  std::vector<std::int32_t> col(col_.size());
  std::vector<double> val(val_.size());
  // Rows are visited in order, so each transposed row comes out sorted.
  for (std::size_t i = 0; i < rows_; ++i)
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const auto dst = static_cast<std::size_t>(fill[static_cast<std::size_t>(col_[static_cast<std::size_t>(k)])]++);
      col[dst] = static_cast<std::int32_t>(i);
      val[dst] = val_[static_cast<std::size_t>(k)];
    }
  return {cols_, rows_, std::move(ptr), std::move(col), std::move(val)};
}

SparseMatrix SparseMatrix::select_rows(std::span<const int> rows) const {
  std::vector<std::int64_t> ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;
  for (int r : rows) {
    if (r < 0 || static_cast<std::size_t>(r) >= rows_) throw MatrixError("row index out of range");
    for (auto k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      col.push_back(col_[static_cast<std::size_t>(k)]);
      val.push_back(val_[static_cast<std::size_t>(k)]);
    }
    ptr.push_back(static_cast<std::int64_t>(col.size()));
  }
  return {rows.size(), cols_, std::move(ptr), std::move(col), std::move(val)};
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
  if (rows_ != cols_) return false;
  const double scale = max_abs();
  const SparseMatrix t = transpose();
  const SparseMatrix d = add(*this, t, 1.0, -1.0);
  return d.max_abs() <= rel_tol * scale;
}

std::string SparseMatrix::structure_error() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) return "row pointer decreases at row " + std::to_string(i);
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const auto c = col_[static_cast<std::size_t>(k)];
      if (c < 0 || static_cast<std::size_t>(c) >= cols_)
        return "column out of range in row " + std::to_string(i);
      if (k > row_ptr_[i] && col_[static_cast<std::size_t>(k - 1)] >= c)
        return "unsorted or duplicate column in row " + std::to_string(i);
    }
  }
  return {};
}

void TripletBuilder::add(int i, int j, double v) {
  if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= rows_ || static_cast<std::size_t>(j) >= cols_)
    throw MatrixError("triplet index out of range");
  entries_.push_back({i, j, v});
}

SparseMatrix TripletBuilder::build() const {
  // Counting sort by row, then sort each row by column and merge duplicates.
  std::vector<std::int64_t> count(rows_ + 1, 0);
  for (const auto& e : entries_) ++count[static_cast<std::size_t>(e.i) + 1];
  for (std::size_t r = 0; r < rows_; ++r) count[r + 1] += count[r];
  std::vector<std::pair<std::int32_t, double>> by_row(entries_.size());
  std::vector<std::int64_t> fill(count.begin(), count.end() - 1);
  for (const auto& e : entries_)
    by_row[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.i)]++)] = {e.j, e.v};
  std::vector<std::int64_t> ptr(rows_ + 1, 0);
  std::vector<std::int32_t> col;
  std::vector<double> val;
  col.reserve(entries_.size());
  val.reserve(entries_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    auto b = by_row.begin() + count[r];
    auto e = by_row.begin() + count[r + 1];
    std::sort(b, e, [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto it = b; it != e; ++it) {
      if (!col.empty() && static_cast<std::int64_t>(col.size()) > ptr[r] && col.back() == it->first)
        val.back() += it->second;
      else {
        col.push_back(it->first);
        val.push_back(it->second);
      }
    }
    ptr[r + 1] = static_cast<std::int64_t>(col.size());
  }
  return {rows_, cols_, std::move(ptr), std::move(col), std::move(val)};
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw MatrixError("product dimension mismatch");
  const auto& ap = a.row_ptr();
  const auto& ac = a.col();
  const auto& av = a.values();
  const auto& bp = b.row_ptr();
  const auto& bc = b.col();
  const auto& bv = b.values();
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<std::int32_t> mark(b.cols(), -1);
  std::vector<std::int32_t> touched;
  std::vector<std::int64_t> ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    touched.clear();
    for (auto k = ap[i]; k < ap[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(ac[static_cast<std::size_t>(k)]);
      const double aij = av[static_cast<std::size_t>(k)];
      for (auto l = bp[j]; l < bp[j + 1]; ++l) {
        const auto c = bc[static_cast<std::size_t>(l)];
        if (mark[static_cast<std::size_t>(c)] != static_cast<std::int32_t>(i)) {
          mark[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(i);
          acc[static_cast<std::size_t>(c)] = 0.0;
          touched.push_back(c);
        }
        acc[static_cast<std::size_t>(c)] += aij * bv[static_cast<std::size_t>(l)];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto c : touched) {
      col.push_back(c);
      val.push_back(acc[static_cast<std::size_t>(c)]);
    }
    ptr.push_back(static_cast<std::int64_t>(col.size()));
  }
  return {a.rows(), b.cols(), std::move(ptr), std::move(col), std::move(val)};
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw MatrixError("sum dimension mismatch");
  std::vector<std::int64_t> ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;
  col.reserve(a.nnz() + b.nnz());
  val.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ka = a.row_ptr()[i], ea = a.row_ptr()[i + 1];
    auto kb = b.row_ptr()[i], eb = b.row_ptr()[i + 1];
    while (ka < ea || kb < eb) {
      const auto ca = ka < ea ? a.col()[static_cast<std::size_t>(ka)] : INT32_MAX;
      const auto cb = kb < eb ? b.col()[static_cast<std::size_t>(kb)] : INT32_MAX;
      if (ca == cb) {
        col.push_back(ca);
        val.push_back(alpha * a.values()[static_cast<std::size_t>(ka++)] +
                      beta * b.values()[static_cast<std::size_t>(kb++)]);
      } else if (ca < cb) {
        col.push_back(ca);
        val.push_back(alpha * a.values()[static_cast<std::size_t>(ka++)]);
      } else {
        col.push_back(cb);
        val.push_back(beta * b.values()[static_cast<std::size_t>(kb++)]);
      }
    }
    ptr.push_back(static_cast<std::int64_t>(col.size()));
  }
  return {a.rows(), a.cols(), std::move(ptr), std::move(col), std::move(val)};
}

SparseMatrix congruence(const SparseMatrix& a, const SparseMatrix& p) {
  if (a.rows() != a.cols() || a.cols() != p.rows()) throw MatrixError("congruence dimension mismatch");
  return multiply(p.transpose(), multiply(a, p));
}

}  // namespace camr
