#pragma once

#include <random>

#include "physbench/core.hpp"

namespace pb::testing {

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(normal(rng), normal(rng));
  }
  return m;
}

inline CVector random_unit_vector(Eigen::Index n, std::mt19937_64& rng) {
  CVector v = random_complex(n, 1, rng);
  return v / v.norm();
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace pb::testing
