#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "physbench/core.hpp"
#include "physbench/sparse.hpp"

namespace pb::wehrl {

// Spin-j state in the |j,m> basis, index k carries m = j - k.
class SpinState {
 public:
  SpinState(SpinSite j, CVector amplitudes);

  [[nodiscard]] SpinSite spin() const { return j_; }
  [[nodiscard]] double j() const { return j_.spin(); }
  [[nodiscard]] const CVector& amplitudes() const { return amp_; }
  [[nodiscard]] double norm() const { return amp_.norm(); }
  [[nodiscard]] SpinState normalized() const;
  // |<a|b>| deviation from 1 after removing the global phase.
  [[nodiscard]] double distance_up_to_phase(const SpinState& other) const;

 private:
  SpinSite j_;
  CVector amp_;
};

struct SpherePoint {
  double theta = 0.0;
  double phi = 0.0;
  [[nodiscard]] std::array<double, 3> unit_vector() const;
  static SpherePoint from_vector(const std::array<double, 3>& v);
};

// Squared chordal distance on the sphere of radius 1/2; antipodes give 1.
[[nodiscard]] double chordal_sq(const SpherePoint& a, const SpherePoint& b);

[[nodiscard]] SpinState coherent_state(SpinSite j, double theta, double phi);
[[nodiscard]] SpinState coherent_state(SpinSite j, const SpherePoint& p);

// |<Omega|psi>|^2 at the coherent state pointing to (theta, phi).
[[nodiscard]] double husimi(const SpinState& state, double theta, double phi);

// Extended complex number; nullopt is the point at infinity.
using ExtComplex = std::optional<cplx>;

// psi = phase * sqrt(c) * P_j(omega_1 x ... x omega_2j), omega_k proportional to
// |up> - z_k |down> (|down> for z_k at infinity). The zeros of the Husimi
// function sit at the antipodes of the points omega_k.
class MajoranaState {
 public:
  MajoranaState(SpinSite j, std::vector<ExtComplex> roots, cplx phase = 1.0);
  static MajoranaState from_points(SpinSite j, std::span<const SpherePoint> points);

  [[nodiscard]] SpinSite spin() const { return j_; }
  [[nodiscard]] const std::vector<ExtComplex>& roots() const { return roots_; }
  [[nodiscard]] double c() const { return c_; }
  [[nodiscard]] cplx phase() const { return phase_; }
  [[nodiscard]] std::vector<SpherePoint> points() const;
  // Normalized spin-1/2 spinors (up, down) of the points.
  [[nodiscard]] std::vector<std::array<cplx, 2>> spinors() const;

 private:
  SpinSite j_;
  std::vector<ExtComplex> roots_;
  double c_ = 1.0;
  cplx phase_ = 1.0;
};

[[nodiscard]] MajoranaState majorana_factorize(const SpinState& state);
[[nodiscard]] SpinState majorana_reconstruct(const MajoranaState& mj);

// Unnormalized symmetric projection of a product of spin-1/2 spinors, in the |j,m> basis.
[[nodiscard]] CVector symmetric_product(std::span<const std::array<cplx, 2>> spinors);

[[nodiscard]] double wehrl_entropy_formula(const MajoranaState& mj);
[[nodiscard]] double wehrl_entropy_formula(const SpinState& state);

// Gauss-Legendre in cos(theta) times a uniform grid in phi, normalized to total weight 1.
class SphereQuadrature {
 public:
  explicit SphereQuadrature(int n_theta = 64, int n_phi = 0);
  [[nodiscard]] int degree() const { return n_theta_; }
  [[nodiscard]] std::size_t size() const { return weights_.size(); }
  [[nodiscard]] const std::vector<SpherePoint>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }

 private:
  int n_theta_;
  std::vector<SpherePoint> nodes_;
  std::vector<double> weights_;
};

// -(2j+1) * integral of Q ln Q over the normalized sphere measure.
[[nodiscard]] double wehrl_entropy_quadrature(const SpinState& state, const SphereQuadrature& quad);
// (2j+1) * integral of Q.
[[nodiscard]] double husimi_normalization(const SpinState& state, const SphereQuadrature& quad);
// 2j + integral of ln Q, by nested adaptive Gauss-Kronrod; equals ln c.
[[nodiscard]] double log_c_from_quadrature(const SpinState& state, double tol = 1e-9);
// (2js+1) * integral of Q^s.
[[nodiscard]] double norm_power_check(const SpinState& state, int s, const SphereQuadrature& quad);

struct JensenReport {
  double entropy = 0.0;
  double bound = 0.0;
  [[nodiscard]] bool holds(double tol = 1e-9) const { return entropy >= bound - tol; }
};
[[nodiscard]] JensenReport jensen_lower_bound_check(const SpinState& state, const SphereQuadrature& quad);

// Closed forms in squared chordal distances. Spin 3/2 takes (eps, mu, nu) =
// (|23|, |13|, |12|); spin 2 takes (eps, mu, nu, alpha, beta, gamma) =
// (|23|, |13|, |12|, |14|, |24|, |34|).
[[nodiscard]] double closed_form_spin1(double mu);
[[nodiscard]] double closed_form_spin3half(double eps, double mu, double nu);
[[nodiscard]] double closed_form_spin2(double eps, double mu, double nu, double alpha, double beta, double gamma);
// Dispatches on the number of points (2, 3 or 4) and derives the distances.
[[nodiscard]] double closed_form_entropy(std::span<const SpherePoint> points);

struct ScanReport {
  double min_entropy = 0.0;
  double coherent_value = 0.0;
  std::vector<SpherePoint> argmin_points;
  [[nodiscard]] bool counterexample(double tol = 1e-7) const { return min_entropy < coherent_value - tol; }
};

struct ScanOptions {
  int n_samples = 20;        // random restarts
  int optimizer_steps = 200;
  std::uint64_t seed = 7;
};

[[nodiscard]] ScanReport lieb_conjecture_scan(SpinSite j, const ScanOptions& opt = {});

// exp(-i angle n.S) in the |j,m> basis.
[[nodiscard]] CMatrix wigner_rotation(SpinSite j, const std::array<double, 3>& axis, double angle);
[[nodiscard]] SpinState rotate(const SpinState& state, const CMatrix& rotation);

}  // namespace pb::wehrl
