#pragma once

#include <vector>

#include "physbench/core.hpp"

namespace pb::laxflow {

// Group automorphism X -> C X C^{-1} for a fixed invertible C.
class Twist {
 public:
  static Twist identity(Eigen::Index n);
  static Twist diagonal(const RVector& d);
  // C e_k = e_{perm[k]}
  static Twist permutation(const std::vector<int>& perm);

  [[nodiscard]] const RMatrix& conjugator() const { return c_; }
  [[nodiscard]] Eigen::Index size() const { return c_.rows(); }
  [[nodiscard]] RMatrix apply(const RMatrix& x) const { return c_ * x * c_inv_; }
  [[nodiscard]] bool is_identity() const { return (c_ - RMatrix::Identity(size(), size())).cwiseAbs().maxCoeff() == 0.0; }
  // Whether upper and lower triangular matrices are mapped to themselves, checked on elementary generators.
  [[nodiscard]] bool preserves_splitting() const;

 private:
  explicit Twist(RMatrix c);
  RMatrix c_, c_inv_;
};

// h(L) = tr((C^{-1} L)^k) / k, invariant under L -> phi(g) L g^{-1}.
class PowerTrace {
 public:
  explicit PowerTrace(int k);
  [[nodiscard]] int power() const { return k_; }
  [[nodiscard]] double value(const RMatrix& l, const Twist& phi) const;
  // Gradient under the trace pairing: (C^{-1} L)^k.
  [[nodiscard]] RMatrix gradient(const RMatrix& l, const Twist& phi) const;

 private:
  int k_;
};

// Strictly upper part plus half the diagonal, and the lower counterpart; x = plus(x) + minus(x).
[[nodiscard]] RMatrix project_plus(const RMatrix& x);
[[nodiscard]] RMatrix project_minus(const RMatrix& x);

struct FactorizationResult {
  RMatrix g_minus;  // lower triangular
  RMatrix g_plus;   // upper triangular
  double residual = 0.0;  // |g_minus^{-1} g_plus - g|
};

// g = g_minus^{-1} g_plus with diag(g_plus) = diag(g_minus)^{-1} = sqrt(pivots).
[[nodiscard]] FactorizationResult factorize(const RMatrix& g);

struct LaxSystem {
  RMatrix l0;
  PowerTrace hamiltonian{2};
  Twist twist = Twist::identity(1);
};

[[nodiscard]] LaxSystem make_system(RMatrix l0, int power, Twist twist);

struct LaxTrajectory {
  std::vector<double> times;
  std::vector<RMatrix> states;  // from the plus factor
  double branch_gap = 0.0;      // max |L_plus(t) - L_minus(t)|
};

[[nodiscard]] LaxTrajectory lax_solve_by_factorization(const LaxSystem& sys, const std::vector<double>& times);

// L(t) = phi(g_pm) L0 g_pm^{-1} for both factors of exp(t grad h(L0)).
struct FlowPoint {
  RMatrix from_plus;
  RMatrix from_minus;
};
[[nodiscard]] FlowPoint flow_point(const LaxSystem& sys, double t);

struct OdeOptions {
  double initial_step = 0.05;
  double agreement = 1e-8;
  int max_halvings = 14;
};

// RK4 on dL/dt = phi(M)L - LM with M = plus-projection of the gradient,
// halving the step until successive answers agree.
[[nodiscard]] RMatrix lax_ode_reference(const LaxSystem& sys, double t_end, const OdeOptions& opt = {});

[[nodiscard]] RVector sorted_real_spectrum(const RMatrix& l);
// Largest |spectrum(a) - spectrum(b)| after sorting complex eigenvalues.
[[nodiscard]] double spectrum_distance(const RMatrix& a, const RMatrix& b);

}  // namespace pb::laxflow
