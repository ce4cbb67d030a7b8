#pragma once

#include <Eigen/Dense>

#include "camr/fem/sparse.hpp"

namespace camr::testing {

inline Eigen::MatrixXd dense(const SparseMatrix& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (auto k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      m(static_cast<Eigen::Index>(i), a.col()[static_cast<std::size_t>(k)]) += a.values()[static_cast<std::size_t>(k)];
  return m;
}

inline SparseMatrix sparse_from(const Eigen::MatrixXd& m) {
  TripletBuilder b(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) b.add(static_cast<int>(i), static_cast<int>(j), m(i, j));
  return b.build();
}

}  // namespace camr::testing
