#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace camr {

/// Row-compressed real matrix with sorted, duplicate-free column indices.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> row_ptr,
               std::vector<std::int32_t> col, std::vector<double> val);

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }
  const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::int32_t>& col() const { return col_; }
  const std::vector<double>& values() const { return val_; }
  std::vector<double>& values() { return val_; }

  /// Entry lookup by binary search; 0 for structural zeros.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal_values() const;
  double max_abs() const;

  /// y = A x, through the runtime-selected kernel.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  /// y = A^T x
  std::vector<double> multiply_transpose(std::span<const double> x) const;

  SparseMatrix transpose() const;
  /// Keeps the listed rows, in the given order.
  SparseMatrix select_rows(std::span<const int> rows) const;

  /// max |A - A^T| <= rel_tol * max |A|
  bool is_symmetric(double rel_tol = 1e-10) const;
  /// Empty string when sorted, in range and duplicate-free, else a description.
  std::string structure_error() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int32_t> col_;
  std::vector<double> val_;
};

/// Accumulates (i, j, v) entries; duplicates are summed on build.
class TripletBuilder {
 public:
  TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void reserve(std::size_t n) { entries_.reserve(n); }
  void add(int i, int j, double v);
  SparseMatrix build() const;

 private:
  struct Entry {
    std::int32_t i;
    std::int32_t j;
    double v;
  };
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> entries_;
};

/// C = A B
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// C = alpha A + beta B
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);
/// P^T A P
SparseMatrix congruence(const SparseMatrix& a, const SparseMatrix& p);

}  // namespace camr
