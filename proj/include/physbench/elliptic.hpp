#pragma once

#include <optional>
#include <span>
#include <vector>

#include "physbench/core.hpp"

namespace pb::elliptic {

struct EllipticParams {
  cplx tau{0.0, 0.8};
  cplx eta{0.11, 0.02};
  cplx c{0.7, 0.1};
  int rank = 2;

  void validate() const;
};

// Odd Jacobi theta function with nome exp(i pi tau).
[[nodiscard]] cplx theta(cplx u, cplx tau);
// Same series with a caller-chosen term cutoff, for truncation studies.
[[nodiscard]] cplx theta_with_cutoff(cplx u, cplx tau, double cutoff);

// Throws SingularError when z is within `tol` of the lattice Z + tau Z.
void guard_pole(cplx z, cplx tau, double tol = 1e-9);

enum class WeightType { same, adjacent_ii, adjacent_ij };

// Nontrivial face weights for start weight `lambda`; i, j are step indices (0-based).
[[nodiscard]] cplx boltzmann_weight(WeightType type, std::span<const cplx> lambda, int i, int j, cplx u,
                                    const EllipticParams& p);

// Weight of the face whose lower path from `start` takes steps i then j and
// whose upper path first takes step k. Zero for inadmissible squares.
[[nodiscard]] cplx face_weight(std::span<const cplx> start, int i, int j, int k, cplx u, const EllipticParams& p);

// lambda + eta * (sum of traceless unit vectors of `steps`).
[[nodiscard]] CVector shifted(std::span<const cplx> lambda, std::span<const int> steps, const EllipticParams& p);

// Braid-form dynamical Yang-Baxter residual over all three-step paths.
[[nodiscard]] double dybe_residual(std::span<const cplx> lambda, cplx u, cplx v, const EllipticParams& p);

// L^i_j(lambda, mu | u)
[[nodiscard]] cplx ruijsenaars_L(std::span<const cplx> lambda, std::span<const cplx> mu, int i, int j, cplx u,
                                 const EllipticParams& p);

// Dynamical RLL residual over all external indices.
[[nodiscard]] double rll_residual(std::span<const cplx> lambda, std::span<const cplx> mu, cplx u, cplx v,
                                  const EllipticParams& p);

// Wavefunction on lambda = base + eta * (m_1 e_1 + ... + m_{N-1} e_{N-1}) with
// traceless unit vectors e and integer m in a box window.
class LatticeWavefunction {
 public:
  LatticeWavefunction(CVector base, std::vector<int> lo, std::vector<int> hi);

  [[nodiscard]] int rank() const { return static_cast<int>(base_.size()); }
  [[nodiscard]] const CVector& base() const { return base_; }
  [[nodiscard]] const std::vector<int>& lo() const { return lo_; }
  [[nodiscard]] const std::vector<int>& hi() const { return hi_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  [[nodiscard]] std::optional<std::size_t> index(const std::vector<int>& m) const;
  [[nodiscard]] std::vector<int> coords(std::size_t idx) const;
  [[nodiscard]] CVector lambda_at(const std::vector<int>& m, cplx eta) const;

  [[nodiscard]] std::optional<cplx> at(const std::vector<int>& m) const;
  void set(const std::vector<int>& m, cplx value);
  void invalidate(std::size_t idx) { valid_[idx] = false; }
  [[nodiscard]] bool valid(std::size_t idx) const { return valid_[idx]; }
  [[nodiscard]] cplx value(std::size_t idx) const { return values_[idx]; }

 private:
  CVector base_;
  std::vector<int> lo_, hi_;
  std::vector<cplx> values_;
  std::vector<bool> valid_;
};

// Coordinates of the point lambda - eta e_i.
[[nodiscard]] std::vector<int> shift_down(const std::vector<int>& m, int i, int rank);

// (H psi)(lambda) = sum_i prod_{j != i} theta(c eta/N + lambda_j - lambda_i) / theta(lambda_j - lambda_i) psi(lambda - eta e_i).
// Points whose shifted neighbours leave the window come back invalid.
[[nodiscard]] LatticeWavefunction ruijsenaars_apply(const LatticeWavefunction& psi, const EllipticParams& p);

// Coefficient of the shift by -eta e_i at lambda.
[[nodiscard]] cplx ruijsenaars_coefficient(std::span<const cplx> lambda, int i, const EllipticParams& p);

}  // namespace pb::elliptic
