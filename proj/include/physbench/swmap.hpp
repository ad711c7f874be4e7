#pragma once

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "physbench/polyfield.hpp"

namespace pb::swmap {

using poly::DField;
using poly::DPoly;
using poly::Rational;
using poly::RField;
using poly::RPoly;

// theta (1 + t f theta)^{-1} at x.
[[nodiscard]] RMatrix theta_t(const DField& theta, const DField& f, double t, std::span<const double> x);
// RK4 solution of d/dt theta_t = -theta_t f theta_t from theta(x).
[[nodiscard]] RMatrix theta_t_ode(const DField& theta, const DField& f, double t, std::span<const double> x,
                                  int steps = 256);

using BivectorFn = std::function<RMatrix(std::span<const double>)>;
// Largest component of the Jacobiator theta^{il} d_l theta^{jk} + cyclic, with
// derivatives from a fourth-order central difference.
[[nodiscard]] double schouten_residual(const BivectorFn& theta, std::span<const double> x, double step = 1e-3);

struct FlowOptions {
  int base_steps = 64;
  double agreement = 1e-9;
  int max_halvings = 6;
  double jacobian_step = 1e-5;
};

struct FlowResult {
  RVector point;
  double integral = 0.0;  // integral over [t0, t1] of the tracked function along the path
  int steps = 0;
};

// Time-dependent vector field X_t^j = theta_t^{ji} a_i and its flow.
class MoserFlow {
 public:
  MoserFlow(const RField& theta, const RField& a, FlowOptions opt = {});

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] const FlowOptions& options() const { return opt_; }
  [[nodiscard]] const DField& theta() const { return theta_; }
  [[nodiscard]] const DField& field_strength() const { return f_; }

  [[nodiscard]] RVector velocity(double t, const RVector& x) const;
  // RK4 with the given number of steps; `tracked` is integrated along the path when set.
  [[nodiscard]] FlowResult integrate(const RVector& x, double t0, double t1, int steps, const DPoly* tracked = nullptr) const;
  // Step halving from base_steps until successive images agree.
  [[nodiscard]] FlowResult solve(const RVector& x, double t0 = 0.0, double t1 = 1.0, const DPoly* tracked = nullptr) const;

  [[nodiscard]] RVector map(const RVector& x) const { return solve(x).point; }
  [[nodiscard]] RVector inverse(const RVector& y) const { return solve(y, 1.0, 0.0).point; }
  // Central-difference Jacobian of the time-one map at a fixed step count.
  [[nodiscard]] RMatrix jacobian(const RVector& x, int steps) const;
  [[nodiscard]] RMatrix jacobian(const RVector& x) const { return jacobian(x, solve(x).steps); }

 private:
  std::size_t dim_;
  DField theta_, a_, f_;
  FlowOptions opt_;
};

[[nodiscard]] RVector moser_flow(const RField& theta, const RField& a, const RVector& x, double t_end = 1.0);

// max |J theta J^T - theta_1(Phi(x))| over the samples.
[[nodiscard]] double pushforward_residual(const RField& theta, const RField& a, const std::vector<RVector>& samples,
                                          const FlowOptions& opt = {});

// sum_{n <= order} (X_t + d_t)^n lambda / (n+1)! at t = 0, exact.
// Extra polynomial variables beyond the coordinates act as constants.
[[nodiscard]] RPoly lambda_tilde(const RField& theta, const RField& a, const RPoly& lambda, int order);
// The closed component form up to second order.
[[nodiscard]] RPoly lambda_tilde_second_order_closed_form(const RField& theta, const RField& a, const RPoly& lambda);

// int_0^1 lambda(Phi_s(x)) ds, which generates the gauge variation exactly.
[[nodiscard]] double lambda_tilde_exact(const MoserFlow& flow, const RPoly& lambda, const RVector& x, int steps);

// max over samples and test functions (coordinates and their pairwise products) of
// |rho_{a + eps d lambda}(f) - rho_a(f) - eps {rho_a(f), lambda~}|, rho_a(f) = f o Phi.
[[nodiscard]] double gauge_covariance_residual(const RField& theta, const RField& a, const RPoly& lambda, double eps,
                                               const std::vector<RVector>& samples, const FlowOptions& opt = {});

struct ScalingFit {
  std::vector<double> eps;
  std::vector<double> residuals;
  double exponent = 0.0;  // +inf when every residual vanishes
};
[[nodiscard]] ScalingFit fit_scaling(std::vector<double> eps, std::vector<double> residuals);
[[nodiscard]] ScalingFit gauge_covariance_scaling(const RField& theta, const RField& a, const RPoly& lambda,
                                                  const std::vector<RVector>& samples, std::vector<double> eps = {1e-2, 1e-3});

struct ConsistencyReport {
  int order = 0;
  RPoly residual;               // in the coordinates plus a trailing field-scale variable
  int lowest_field_degree = -1; // smallest power of the field scale present; -1 if the residual vanishes
  double sample_norm = 0.0;     // max |residual| at the samples with unit scale
};

// delta_alpha l~(beta) - delta_beta l~(alpha) + {l~(alpha), l~(beta)} at the given truncation.
[[nodiscard]] ConsistencyReport semiclassical_consistency(const RField& theta, const RField& a, const RPoly& alpha,
                                                          const RPoly& beta, int order,
                                                          const std::vector<RVector>& samples);

// ---- mini map ----

class LieAlgebra {
 public:
  // c[(a * n + b) * n + c] = C^{ab}_c
  LieAlgebra(int n, std::vector<double> c);
  [[nodiscard]] static LieAlgebra su2();

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] double c(int a, int b, int k) const { return c_[static_cast<std::size_t>((a * n_ + b) * n_ + k)]; }
  [[nodiscard]] double jacobi_residual() const;
  // [u, v]_k = u_a v_b C^{ab}_k
  [[nodiscard]] RVector bracket(const RVector& u, const RVector& v) const;

 private:
  int n_;
  std::vector<double> c_;
};

struct MiniFields {
  std::size_t dim = 0;
  DField a_mu;    // dim x n: a_{mu b}
  DField a_ext;   // n: a_b
  DField lambda;  // n: lambda_b
};

struct MiniMapValue {
  RMatrix potential;  // dim x n: A_mu^a
  RVector parameter;  // n: Lambda^a
};

[[nodiscard]] MiniMapValue mini_sw_map(const LieAlgebra& lie, const MiniFields& fields, std::span<const double> x);
// Fields moved by eps along the abelian orbit: a_{mu b} += eps d_mu lambda_b, a_b += eps lambda_b.
[[nodiscard]] MiniFields gauge_shift(const MiniFields& fields, double eps);
// max |A(a_eps) - A(a) - eps (d Lambda + [A, Lambda])| at x.
[[nodiscard]] double mini_gauge_residual(const LieAlgebra& lie, const MiniFields& fields, double eps,
                                         std::span<const double> x);
[[nodiscard]] ScalingFit mini_gauge_scaling(const LieAlgebra& lie, const MiniFields& fields,
                                            const std::vector<RVector>& samples, std::vector<double> eps = {1e-2, 1e-3});
// Fields with random linear components.
[[nodiscard]] MiniFields random_linear_mini_fields(std::size_t dim, int n, std::mt19937_64& rng);

// ---- star product ----

// Moyal product for constant theta. Inputs live on dim + 1 variables; the last
// one is the formal deformation parameter kappa = i hbar.
[[nodiscard]] RPoly moyal_star(const RPoly& f, const RPoly& g, const RField& theta, int order);

// ---- DBI densities ----

struct DbiReport {
  RMatrix open_metric;   // G
  RMatrix open_b;        // Phi
  double coupling_ratio = 0.0;  // G_s / g_s
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

[[nodiscard]] DbiReport dbi_identity(const RMatrix& g, const RMatrix& b, const RMatrix& f, const RMatrix& theta);
[[nodiscard]] inline double dbi_identity_residual(const RMatrix& g, const RMatrix& b, const RMatrix& f,
                                                  const RMatrix& theta) {
  return dbi_identity(g, b, f, theta).residual;
}

struct DbiInstance {
  RMatrix g, b, f, theta;
};
// Random admissible draw: every determinant under a square root is positive.
[[nodiscard]] DbiInstance random_dbi_instance(int dim, std::mt19937_64& rng);

}  // namespace pb::swmap
