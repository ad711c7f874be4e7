#include "physbench/wehrl.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "physbench/spinalg.hpp"

namespace pb::wehrl {

namespace {

double binom(int n, int k) { return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(k)); }

std::array<cplx, 2> spinor_of_root(const ExtComplex& z) {
  if (!z) return {cplx(0.0), cplx(1.0)};
  const double n = std::sqrt(1.0 + std::norm(*z));
  return {cplx(1.0 / n), -*z / n};
}

std::array<cplx, 2> spinor_of_point(const SpherePoint& p) {
  return {std::cos(0.5 * p.theta) * std::exp(cplx(0.0, -0.5 * p.phi)),
          std::sin(0.5 * p.theta) * std::exp(cplx(0.0, 0.5 * p.phi))};
}

SpherePoint point_of_spinor(const std::array<cplx, 2>& s) {
  const cplx cross = std::conj(s[0]) * s[1];
  const double nrm = std::norm(s[0]) + std::norm(s[1]);
  return SpherePoint::from_vector({2.0 * cross.real() / nrm, 2.0 * cross.imag() / nrm,
                                   (std::norm(s[0]) - std::norm(s[1])) / nrm});
}

ExtComplex root_of_spinor(const std::array<cplx, 2>& s) {
  if (std::abs(s[0]) < 1e-300) return std::nullopt;
  return -s[1] / s[0];
}

// In-place diagonal similarity scaling of a square matrix (Parlett-Reinsch).
void balance(CMatrix& a) {
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i) continue;
        c += std::abs(a(k, i));
        r += std::abs(a(i, k));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

cplx horner(const std::vector<cplx>& coeff, cplx w) {
  cplx acc = 0.0;
  for (std::size_t k = coeff.size(); k-- > 0;) acc = acc * w + coeff[k];
  return acc;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeff) {
  const auto d = static_cast<Eigen::Index>(coeff.size()) - 1;
  if (d <= 0) return {};
  CMatrix comp = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) comp(0, k) = -coeff[static_cast<std::size_t>(d - 1 - k)] / coeff.back();
  for (Eigen::Index k = 1; k < d; ++k) comp(k, k - 1) = 1.0;
  balance(comp);
  Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("companion eigenvalue solve failed");
  std::vector<cplx> deriv;
  for (std::size_t k = 1; k < coeff.size(); ++k) deriv.push_back(static_cast<double>(k) * coeff[k]);
  std::vector<cplx> roots;
  for (Eigen::Index k = 0; k < d; ++k) {
    cplx z = es.eigenvalues()(k);
    for (int it = 0; it < 3; ++it) {
      const cplx dp = horner(deriv, z);
      if (std::abs(dp) < 1e-300) break;
      const cplx step = horner(coeff, z) / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag()) || std::abs(step) > 1e-3 * (1.0 + std::abs(z))) break;
      z -= step;
    }
    roots.push_back(z);
  }
  return roots;
}

}  // namespace

SpinState::SpinState(SpinSite j, CVector amplitudes) : j_(j), amp_(std::move(amplitudes)) {
  if (amp_.size() != j_.dim()) throw ShapeError("amplitude count must be 2j+1");
}

SpinState SpinState::normalized() const {
  const double n = amp_.norm();
  if (n == 0.0) throw DomainError("cannot normalize the zero state");
  return SpinState(j_, amp_ / n);
}

double SpinState::distance_up_to_phase(const SpinState& other) const {
  if (!(other.j_ == j_)) throw ShapeError("spin mismatch");
  return 1.0 - std::abs(amp_.dot(other.amp_)) / (amp_.norm() * other.amp_.norm());
}

std::array<double, 3> SpherePoint::unit_vector() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

SpherePoint SpherePoint::from_vector(const std::array<double, 3>& v) {
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (r == 0.0) throw DomainError("zero vector has no direction");
  return {std::acos(std::clamp(v[2] / r, -1.0, 1.0)), std::atan2(v[1], v[0])};
}

double chordal_sq(const SpherePoint& a, const SpherePoint& b) {
  const auto u = a.unit_vector();
  const auto v = b.unit_vector();
  const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  return std::max(0.0, 0.5 * (1.0 - dot));
}

SpinState coherent_state(SpinSite j, double theta, double phi) {
  const int n = j.twice();
  const double js = j.spin();
  const double p = std::cos(0.5 * theta) * std::cos(0.5 * theta);
  CVector amp(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double m = js - k;
    const int up = n - k;  // j + m
    const double mag = std::sqrt(binom(n, up)) * std::pow(p, 0.5 * up) * std::pow(1.0 - p, 0.5 * k);
    amp(k) = mag * std::exp(cplx(0.0, -m * phi));
  }
  return SpinState(j, amp);
}

SpinState coherent_state(SpinSite j, const SpherePoint& p) { return coherent_state(j, p.theta, p.phi); }

double husimi(const SpinState& state, double theta, double phi) {
  const SpinState omega = coherent_state(state.spin(), theta, phi);
  return std::norm(omega.amplitudes().dot(state.amplitudes()));
}

CVector symmetric_product(std::span<const std::array<cplx, 2>> spinors) {
  // Coefficients of prod_k (down_k + up_k x); x^n collects n up factors.
  std::vector<cplx> poly{1.0};
  for (const auto& s : spinors) {
    std::vector<cplx> next(poly.size() + 1, 0.0);
    for (std::size_t n = 0; n < poly.size(); ++n) {
      next[n] += poly[n] * s[1];
      next[n + 1] += poly[n] * s[0];
    }
    poly = std::move(next);
  }
  const int twice = static_cast<int>(spinors.size());
  CVector out(twice + 1);
  for (int k = 0; k <= twice; ++k) {
    const int up = twice - k;
    out(k) = poly[static_cast<std::size_t>(up)] / std::sqrt(binom(twice, up));
  }
  return out;
}

MajoranaState::MajoranaState(SpinSite j, std::vector<ExtComplex> roots, cplx phase)
    : j_(j), roots_(std::move(roots)), phase_(phase) {
  if (static_cast<int>(roots_.size()) != j_.twice()) throw ShapeError("a spin-j state needs exactly 2j points");
  const auto sp = spinors();
  const double n2 = symmetric_product(sp).squaredNorm();
  if (n2 <= 0.0) throw DomainError("points give a vanishing projected product");
  c_ = 1.0 / n2;
  phase_ /= std::abs(phase_);
}

MajoranaState MajoranaState::from_points(SpinSite j, std::span<const SpherePoint> points) {
  std::vector<ExtComplex> roots;
  for (const auto& p : points) roots.push_back(root_of_spinor(spinor_of_point(p)));
  return MajoranaState(j, std::move(roots));
}

std::vector<std::array<cplx, 2>> MajoranaState::spinors() const {
  std::vector<std::array<cplx, 2>> out;
  for (const auto& z : roots_) out.push_back(spinor_of_root(z));
  return out;
}

std::vector<SpherePoint> MajoranaState::points() const {
  std::vector<SpherePoint> out;
  for (const auto& s : spinors()) out.push_back(point_of_spinor(s));
  return out;
}

MajoranaState majorana_factorize(const SpinState& state) {
  const double nrm = state.norm();
  if (nrm == 0.0) throw DomainError("the zero state has no point representation");
  const int twice = state.spin().twice();
  // Overlap polynomial sum_k sqrt(binom(2j,k)) psi_{k-j} w^k.
  std::vector<cplx> coeff(static_cast<std::size_t>(twice) + 1);
  double cmax = 0.0;
  for (int up = 0; up <= twice; ++up) {
    coeff[static_cast<std::size_t>(up)] = std::sqrt(binom(twice, up)) * state.amplitudes()(twice - up) / nrm;
    cmax = std::max(cmax, std::abs(coeff[static_cast<std::size_t>(up)]));
  }
  while (coeff.size() > 1 && std::abs(coeff.back()) <= 1e-14 * cmax) coeff.pop_back();
  std::vector<ExtComplex> roots;
  for (const cplx& z : polynomial_roots(coeff)) roots.emplace_back(z);
  while (static_cast<int>(roots.size()) < twice) roots.emplace_back(std::nullopt);

  MajoranaState bare(state.spin(), roots);
  const CVector prod = symmetric_product(bare.spinors());
  const cplx overlap = prod.dot(state.amplitudes());
  return MajoranaState(state.spin(), std::move(roots), overlap);
}

SpinState majorana_reconstruct(const MajoranaState& mj) {
  const CVector prod = symmetric_product(mj.spinors());
  return SpinState(mj.spin(), mj.phase() * std::sqrt(mj.c()) * prod);
}

double wehrl_entropy_formula(const MajoranaState& mj) {
  const int twice = mj.spin().twice();
  std::vector<double> weight(static_cast<std::size_t>(twice) + 1);
  double acc = 0.0;
  for (int k = 0; k <= twice; ++k) {
    acc += 1.0 / (twice + 1 - k);
    weight[static_cast<std::size_t>(k)] = acc;
  }
  const auto sp = mj.spinors();
  double total = 0.0;
  for (const auto& pivot : sp) {
    // SU(2) element sending the pivot spinor to |up>.
    const cplx a = pivot[0], b = pivot[1];
    std::vector<std::array<cplx, 2>> turned;
    for (const auto& s : sp) turned.push_back({std::conj(a) * s[0] + std::conj(b) * s[1], -b * s[0] + a * s[1]});
    const CVector rotated = symmetric_product(turned);
    for (int k = 0; k <= twice; ++k) total += weight[static_cast<std::size_t>(k)] * mj.c() * std::norm(rotated(k));
  }
  return total - std::log(mj.c());
}

double wehrl_entropy_formula(const SpinState& state) { return wehrl_entropy_formula(majorana_factorize(state)); }

SphereQuadrature::SphereQuadrature(int n_theta, int n_phi) : n_theta_(n_theta) {
  if (n_theta < 2) throw DomainError("quadrature needs at least two polar nodes");
  if (n_phi <= 0) n_phi = 2 * n_theta;
  const auto zeros = boost::math::legendre_p_zeros<double>(n_theta);
  std::vector<double> xs;
  for (double x : zeros) {
    xs.push_back(x);
    if (x != 0.0) xs.push_back(-x);
  }
  std::sort(xs.begin(), xs.end());
  for (double x : xs) {
    const double dp = boost::math::legendre_p_prime(n_theta, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    for (int k = 0; k < n_phi; ++k) {
      nodes_.push_back({std::acos(x), 2.0 * kPi * k / n_phi});
      weights_.push_back(0.5 * w / n_phi);
    }
  }
}

namespace {

template <class F>
double integrate_husimi(const SpinState& state, const SphereQuadrature& quad, F&& f) {
  const SpinState psi = state.normalized();
  double acc = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const double q = husimi(psi, quad.nodes()[i].theta, quad.nodes()[i].phi);
    acc += quad.weights()[i] * f(q);
  }
  return acc;
}

void require_degree(const SphereQuadrature& quad, double needed) {
  if (quad.degree() < needed) throw DomainError("quadrature degree too low for this integrand");
}

}  // namespace

double wehrl_entropy_quadrature(const SpinState& state, const SphereQuadrature& quad) {
  require_degree(quad, 4.0 * state.j() + 8.0);
  const double dim = state.spin().dim();
  return -dim * integrate_husimi(state, quad, [](double q) { return q > 1e-300 ? q * std::log(q) : 0.0; });
}

double husimi_normalization(const SpinState& state, const SphereQuadrature& quad) {
  return state.spin().dim() * integrate_husimi(state, quad, [](double q) { return q; });
}

double log_c_from_quadrature(const SpinState& state, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  const SpinState psi = state.normalized();
  auto ring = [&](double x) {
    const double theta = std::acos(std::clamp(x, -1.0, 1.0));
    auto f = [&](double phi) { return std::log(std::max(husimi(psi, theta, phi), 1e-300)); };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, 2.0 * kPi, 15, tol) / (2.0 * kPi);
  };
  return state.spin().twice() + 0.5 * gauss_kronrod<double, 31>::integrate(ring, -1.0, 1.0, 15, tol);
}

double norm_power_check(const SpinState& state, int s, const SphereQuadrature& quad) {
  if (s < 1) throw DomainError("power must be a positive integer");
  require_degree(quad, s * 4.0 * state.j() + 8.0);
  return (state.spin().twice() * s + 1.0) * integrate_husimi(state, quad, [s](double q) { return std::pow(q, s); });
}

JensenReport jensen_lower_bound_check(const SpinState& state, const SphereQuadrature& quad) {
  const double j = state.j();
  return {wehrl_entropy_quadrature(state, quad), std::log((4.0 * j + 1.0) / (2.0 * j + 1.0))};
}

double closed_form_spin1(double mu) {
  const double inv_c = 1.0 - 0.5 * mu;
  const double c = 1.0 / inv_c;
  return 2.0 / 3.0 + c * (0.5 * mu + inv_c * std::log(inv_c));
}

double closed_form_spin3half(double eps, double mu, double nu) {
  const double inv_c = 1.0 - (eps + mu + nu) / 3.0;
  const double c = 1.0 / inv_c;
  return 0.75 + c * ((eps + mu + nu) / 3.0 - (eps * mu + eps * nu + mu * nu) / 6.0 + inv_c * std::log(inv_c));
}

double closed_form_spin2(double eps, double mu, double nu, double alpha, double beta, double gamma) {
  const double triangles = alpha * mu * nu + eps * beta * nu + eps * mu * gamma + alpha * beta * gamma;
  const double opposite = alpha * eps + beta * mu + gamma * nu;
  const double edges = alpha + beta + gamma + mu + nu + eps;
  const double adjacent = alpha * mu + alpha * nu + mu * nu + beta * eps + beta * nu + eps * nu + eps * gamma +
                          eps * mu + mu * gamma + alpha * beta + alpha * gamma + beta * gamma;
  const double inv_c = 1.0 - 0.25 * edges + opposite / 12.0;
  const double sigma = (-0.5 * triangles - 5.0 / 3.0 * opposite - adjacent + 3.0 * edges) / 12.0;
  return 0.8 + (sigma + inv_c * std::log(inv_c)) / inv_c;
}

double closed_form_entropy(std::span<const SpherePoint> p) {
  switch (p.size()) {
    case 2: return closed_form_spin1(chordal_sq(p[0], p[1]));
    case 3: return closed_form_spin3half(chordal_sq(p[1], p[2]), chordal_sq(p[0], p[2]), chordal_sq(p[0], p[1]));
    case 4:
      return closed_form_spin2(chordal_sq(p[1], p[2]), chordal_sq(p[0], p[2]), chordal_sq(p[0], p[1]),
                               chordal_sq(p[0], p[3]), chordal_sq(p[1], p[3]), chordal_sq(p[2], p[3]));
    default: throw DomainError("closed forms exist for 2, 3 or 4 points only");
  }
}

namespace {

using Vec3 = std::array<double, 3>;

double scan_objective(SpinSite j, const std::vector<Vec3>& pts) {
  std::vector<SpherePoint> sp;
  for (const auto& v : pts) sp.push_back(SpherePoint::from_vector(v));
  return wehrl_entropy_formula(MajoranaState::from_points(j, sp));
}

void normalize(Vec3& v) {
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (auto& x : v) x /= r;
}

}  // namespace

ScanReport lieb_conjecture_scan(SpinSite j, const ScanOptions& opt) {
  if (j.twice() < 1 || j.twice() > 6) throw DomainError("scan supports 1/2 <= j <= 3");
  const int n = j.twice();
  ScanReport rep;
  rep.coherent_value = static_cast<double>(n) / (n + 1);
  rep.min_entropy = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  const double h = 1e-6;
  for (int r = 0; r < opt.n_samples; ++r) {
    std::vector<Vec3> pts(static_cast<std::size_t>(n));
    for (auto& v : pts) {
      v = {nd(rng), nd(rng), nd(rng)};
      normalize(v);
    }
    double f = scan_objective(j, pts);
    double step = 0.5;
    for (int it = 0; it < opt.optimizer_steps && step > 1e-12; ++it) {
      std::vector<Vec3> grad(pts.size());
      for (std::size_t p = 0; p < pts.size(); ++p) {
        for (int a = 0; a < 3; ++a) {
          auto plus = pts, minus = pts;
          plus[p][static_cast<std::size_t>(a)] += h;
          minus[p][static_cast<std::size_t>(a)] -= h;
          normalize(plus[p]);
          normalize(minus[p]);
          grad[p][static_cast<std::size_t>(a)] = (scan_objective(j, plus) - scan_objective(j, minus)) / (2.0 * h);
        }
      }
      bool accepted = false;
      while (step > 1e-12) {
        auto trial = pts;
        for (std::size_t p = 0; p < pts.size(); ++p) {
          for (int a = 0; a < 3; ++a) trial[p][static_cast<std::size_t>(a)] -= step * grad[p][static_cast<std::size_t>(a)];
          normalize(trial[p]);
        }
        const double ft = scan_objective(j, trial);
        if (ft < f) {
          pts = std::move(trial);
          f = ft;
          step *= 1.5;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (f < rep.min_entropy) {
      rep.min_entropy = f;
      rep.argmin_points.clear();
      for (const auto& v : pts) rep.argmin_points.push_back(SpherePoint::from_vector(v));
    }
  }
  return rep;
}

CMatrix wigner_rotation(SpinSite j, const std::array<double, 3>& axis, double angle) {
  const double r = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (r == 0.0) throw DomainError("rotation axis must be nonzero");
  const auto sm = spinalg::spin_matrices(j);
  const CMatrix gen = (axis[0] * sm.x + axis[1] * sm.y + axis[2] * sm.z) / r;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gen);
  const CVector phases = (es.eigenvalues() * (-angle)).unaryExpr([](double x) { return std::exp(cplx(0.0, x)); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

SpinState rotate(const SpinState& state, const CMatrix& rotation) {
  if (rotation.rows() != state.spin().dim() || rotation.cols() != state.spin().dim()) throw ShapeError("rotation size mismatch");
  return SpinState(state.spin(), rotation * state.amplitudes());
}

}  // namespace pb::wehrl
