#pragma once

#include <cstdint>

#include "physbench/sparse.hpp"

namespace pb {

enum class Which { lowest, full };

struct EigenOptions {
  // Dimensions up to this size are solved densely.
  std::int64_t dense_cap = 512;
  int krylov_dim = 90;
  int max_restarts = 400;
  double residual_tol = 1e-10;  // relative to the operator norm bound
  std::uint64_t seed = 12345;
};

struct EigenResult {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, orthonormal
  double degeneracy_tol = 1e-8;

  [[nodiscard]] Eigen::Index size() const { return eigenvalues.size(); }
  // Number of leading eigenvalues within the relative degeneracy tolerance of the lowest.
  [[nodiscard]] Eigen::Index ground_block_size() const;
  [[nodiscard]] CMatrix ground_block() const { return eigenvectors.leftCols(ground_block_size()); }
};

// Rotate the phase so that the first component with magnitude above `tol`
// is real and positive.
void fix_phase(Eigen::Ref<CVector> v, double tol = 1e-12);

// Dense Hermitian eigensolve with the phase convention applied.
[[nodiscard]] EigenResult eigensolve_dense(const CMatrix& h);

// `k` lowest (or all) eigenpairs of a Hermitian operator. For which=lowest the
// result is extended so the degenerate ground block is always complete.
[[nodiscard]] EigenResult eigensolve(const SparseOperator& op, Eigen::Index k, Which which,
                                     const EigenOptions& opt = {});

}  // namespace pb
