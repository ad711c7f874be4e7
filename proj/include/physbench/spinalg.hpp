#pragma once

#include <span>

#include "physbench/eigensolve.hpp"
#include "physbench/sparse.hpp"

namespace pb::spinalg {

// Spin-s matrices in the |s,m> basis ordered m = s, s-1, ..., -s.
struct SpinMatrices {
  CMatrix x, y, z, plus, minus;
};

[[nodiscard]] SpinMatrices spin_matrices(SpinSite s);
[[nodiscard]] SpinMatrices spin_matrices(double s);

// `op` acting on `site`, identity elsewhere.
[[nodiscard]] SparseOperator embed(const CMatrix& op, std::size_t site, const HilbertSpace& space);

enum class Axis { x, y, z };

// Spin component summed over the listed sites.
[[nodiscard]] SparseOperator total_component(Axis axis, std::span<const std::size_t> sites,
                                             const HilbertSpace& space);

// coupling * S_i . S_j
[[nodiscard]] SparseOperator heisenberg_bond(std::size_t i, std::size_t j, double coupling,
                                             const HilbertSpace& space);

// (sum over `sites` of S)^2; all sites when `sites` is empty.
[[nodiscard]] SparseOperator spin_squared(std::span<const std::size_t> sites, const HilbertSpace& space);
[[nodiscard]] SparseOperator total_spin_squared(const HilbertSpace& space);

// Product over sites of U|s,m> = (-1)^(s-m) |s,-m>.
[[nodiscard]] SparseOperator spin_rotation_pi_about_y(const HilbertSpace& space);
[[nodiscard]] CMatrix local_rotation_pi_about_y(int local_dim);

// Hermitian square root of a positive semidefinite matrix; eigenvalues in
// (-1e-13, 0) are clamped to zero.
[[nodiscard]] CMatrix psd_sqrt(const CMatrix& a);

// 1/2 (tr cL M cL M^+ + tr cR N cR N^+) - |tr c^+ M c N^+| with cL = sqrt(c c^+), cR = sqrt(c^+ c).
[[nodiscard]] double kls_trace_inequality_residual(const CMatrix& c, const CMatrix& m, const CMatrix& n);

}  // namespace pb::spinalg
