#include <cmath>
#include <random>

#include "doctest.h"
#include "physbench/wehrl.hpp"
#include "support.hpp"

using namespace pb;
using namespace pb::wehrl;

namespace {

SpinState random_state(SpinSite j, std::mt19937_64& rng) {
  return SpinState(j, pb::testing::random_unit_vector(j.dim(), rng));
}

double coherent_value(double j) { return 2.0 * j / (2.0 * j + 1.0); }

// Point at squared chordal distance eps from the north pole on the radius-1/2 sphere.
SpherePoint at_chordal_sq(double eps, double phi) { return SpherePoint{2.0 * std::asin(std::sqrt(eps)), phi}; }

std::vector<SpherePoint> perturbed_coherent(int twice_j, double eps) {
  std::vector<SpherePoint> pts(static_cast<std::size_t>(twice_j), SpherePoint{0.0, 0.0});
  pts.back() = at_chordal_sq(eps, 0.3);
  return pts;
}

}  // namespace

TEST_CASE("coherent states") {
  for (int twice = 1; twice <= 6; ++twice) {
    const auto j = SpinSite::from_twice(twice);
    const auto north = coherent_state(j, 0.0, 0.0);
    CHECK(std::abs(std::abs(north.amplitudes()(0)) - 1.0) < 1e-15);
    CHECK(north.amplitudes().tail(twice).norm() < 1e-15);

    const double theta = 1.1;
    const double p = std::pow(std::cos(theta / 2), 2);
    const auto s = coherent_state(j, theta, 0.4);
    CHECK(std::abs(s.norm() - 1.0) < 1e-14);
    CHECK(std::abs(std::norm(s.amplitudes()(0)) - std::pow(p, twice)) < 1e-14);
  }

  const auto half = coherent_state(SpinSite::from_twice(1), 0.8, 0.6);
  const cplx up = std::cos(0.4) * std::exp(cplx(0.0, -0.3));
  const cplx down = std::sin(0.4) * std::exp(cplx(0.0, 0.3));
  CHECK(std::abs(half.amplitudes()(0) - up) < 1e-15);
  CHECK(std::abs(half.amplitudes()(1) - down) < 1e-15);
}

TEST_CASE("chordal distance on the half sphere") {
  CHECK(chordal_sq(SpherePoint{0.0, 0.0}, SpherePoint{kPi, 0.0}) == doctest::Approx(1.0));
  CHECK(chordal_sq(SpherePoint{0.0, 0.0}, at_chordal_sq(0.3, 1.0)) == doctest::Approx(0.3));
}

TEST_CASE("majorana examples") {
  const auto one = SpinSite::from_twice(2);
  CVector m0 = CVector::Zero(3);
  m0(1) = 1.0;
  const auto mj = majorana_factorize(SpinState(one, m0));
  REQUIRE(mj.roots().size() == 2);
  int zeros = 0, infinities = 0;
  for (const auto& r : mj.roots()) {
    if (!r) ++infinities;
    else if (std::abs(*r) < 1e-12) ++zeros;
  }
  CHECK(zeros == 1);
  CHECK(infinities == 1);
  CHECK(mj.c() == doctest::Approx(2.0));
  const auto pts = mj.points();
  CHECK(chordal_sq(pts[0], pts[1]) == doctest::Approx(1.0));

  const auto coh = majorana_factorize(coherent_state(SpinSite::from_twice(4), 0.0, 0.0));
  const auto cpts = coh.points();
  for (const auto& p : cpts) CHECK(chordal_sq(p, cpts[0]) < 1e-12);
  CHECK(coh.c() == doctest::Approx(1.0));

  std::mt19937_64 rng(2);
  const auto half = majorana_factorize(random_state(SpinSite::from_twice(1), rng));
  CHECK(half.roots().size() == 1);
  CHECK(half.c() == doctest::Approx(1.0));

  CHECK_THROWS((void)majorana_factorize(SpinState(one, CVector::Zero(3))));
}

TEST_CASE("factorize and reconstruct roundtrip") {
  std::mt19937_64 rng(17);
  for (int twice = 1; twice <= 5; ++twice) {
    const auto j = SpinSite::from_twice(twice);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const auto s = random_state(j, rng);
      const auto back = majorana_reconstruct(majorana_factorize(s));
      worst = std::max(worst, back.distance_up_to_phase(s));
      CHECK(std::abs(back.norm() - 1.0) < 1e-12);
    }
    CAPTURE(twice);
    CHECK(worst < 1e-10);
  }
  // Degree deficit: amplitudes vanishing at the bottom of the ladder.
  CVector top = CVector::Zero(4);
  top(0) = 0.6;
  top(1) = cplx(0.0, 0.8);
  const SpinState s(SpinSite::from_twice(3), top);
  CHECK(majorana_reconstruct(majorana_factorize(s)).distance_up_to_phase(s) < 1e-10);
}

TEST_CASE("husimi zeros sit at antipodes of the points") {
  std::mt19937_64 rng(5);
  const auto s = random_state(SpinSite::from_twice(3), rng);
  const auto mj = majorana_factorize(s);
  for (const auto& p : mj.points()) {
    const auto v = p.unit_vector();
    const auto anti = SpherePoint::from_vector({-v[0], -v[1], -v[2]});
    CHECK(husimi(s, anti.theta, anti.phi) < 1e-12);
  }
}

TEST_CASE("quadrature normalization and degree") {
  const SphereQuadrature quad(32);
  double total = 0.0;
  for (double w : quad.weights()) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  double z2 = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) z2 += quad.weights()[k] * std::pow(std::cos(quad.nodes()[k].theta), 2);
  CHECK(z2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  std::mt19937_64 rng(3);
  for (int twice = 1; twice <= 4; ++twice) {
    CHECK(husimi_normalization(random_state(SpinSite::from_twice(twice), rng), quad) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("entropy examples") {
  // Husimi zeros at the poles slow the product rule down; 256 nodes reach 1e-9.
  const SphereQuadrature quad(256);
  for (int twice = 1; twice <= 6; ++twice) {
    const double j = 0.5 * twice;
    const auto coh = coherent_state(SpinSite::from_twice(twice), 0.7, 2.1);
    CHECK(std::abs(wehrl_entropy_formula(coh) - coherent_value(j)) < 1e-9);
  }
  CHECK(std::abs(wehrl_entropy_quadrature(coherent_state(SpinSite::from_twice(2), 0.0, 0.0), quad) - 2.0 / 3.0) < 1e-8);

  CVector m0 = CVector::Zero(3);
  m0(1) = 1.0;
  const SpinState antipodal(SpinSite::from_twice(2), m0);
  const double expected = 5.0 / 3.0 - std::log(2.0);
  CHECK(std::abs(wehrl_entropy_formula(antipodal) - expected) < 1e-10);
  CHECK(std::abs(wehrl_entropy_quadrature(antipodal, quad) - expected) < 1e-8);

  // Equilateral triangle on a great circle.
  const std::vector<SpherePoint> tri{{kPi / 2, 0.0}, {kPi / 2, 2 * kPi / 3}, {kPi / 2, 4 * kPi / 3}};
  const auto mj = MajoranaState::from_points(SpinSite::from_twice(3), tri);
  CHECK(std::abs(wehrl_entropy_formula(mj) - (21.0 / 8.0 - 2.0 * std::log(2.0))) < 1e-10);
  CHECK(std::abs(closed_form_entropy(tri) - (21.0 / 8.0 - 2.0 * std::log(2.0))) < 1e-10);
}

TEST_CASE("closed forms") {
  CHECK(closed_form_spin1(0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(std::abs(closed_form_spin1(0.5) - (2.0 / 3.0 + (4.0 / 3.0) * 0.25 + std::log(0.75))) < 1e-14);
  CHECK(closed_form_spin3half(0.75, 0.75, 0.75) == doctest::Approx(21.0 / 8.0 - 2.0 * std::log(2.0)));

  const auto pair = MajoranaState::from_points(SpinSite::from_twice(2), std::vector<SpherePoint>{{0.0, 0.0}, at_chordal_sq(0.5, 0.2)});
  CHECK(1.0 / pair.c() == doctest::Approx(0.75));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int twice : {2, 3, 4}) {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      std::vector<SpherePoint> pts;
      for (int p = 0; p < twice; ++p) pts.push_back(SpherePoint{std::acos(1 - 2 * u(rng)), 2 * kPi * u(rng)});
      const auto mj = MajoranaState::from_points(SpinSite::from_twice(twice), pts);
      worst = std::max(worst, std::abs(closed_form_entropy(pts) - wehrl_entropy_formula(mj)));
    }
    CAPTURE(twice);
    CHECK(worst < 1e-10);
  }
  CHECK_THROWS((void)closed_form_entropy(std::vector<SpherePoint>(5)));
}

TEST_CASE("formula agrees with quadrature on random states") {
  const SphereQuadrature quad(128);
  std::mt19937_64 rng(31);
  for (int twice : {1, 2, 3, 4}) {
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const auto s = random_state(SpinSite::from_twice(twice), rng);
      worst = std::max(worst, std::abs(wehrl_entropy_formula(s) - wehrl_entropy_quadrature(s, quad)));
    }
    CAPTURE(twice);
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("log c identity") {
  std::mt19937_64 rng(13);
  for (int twice : {1, 2, 3, 4}) {
    for (int k = 0; k < 3; ++k) {
      const auto s = random_state(SpinSite::from_twice(twice), rng);
      CHECK(std::abs(log_c_from_quadrature(s) - std::log(majorana_factorize(s).c())) < 1e-6);
    }
  }
}

TEST_CASE("entropy is invariant under rotations") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int twice : {2, 3, 4, 5}) {
    for (int k = 0; k < 20; ++k) {
      const auto s = random_state(SpinSite::from_twice(twice), rng);
      const auto r = wigner_rotation(s.spin(), {normal(rng), normal(rng), normal(rng)}, normal(rng));
      worst = std::max(worst, std::abs(wehrl_entropy_formula(s) - wehrl_entropy_formula(rotate(s, r))));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("norm powers") {
  const SphereQuadrature quad(64);
  std::mt19937_64 rng(23);
  for (int twice : {1, 2, 3, 4}) {
    const auto coh = coherent_state(SpinSite::from_twice(twice), 1.3, 0.2);
    for (int s : {1, 2, 3}) CHECK(std::abs(norm_power_check(coh, s, quad) - 1.0) < 1e-9);
    for (int k = 0; k < 20; ++k) {
      const auto st = random_state(SpinSite::from_twice(twice), rng);
      CHECK(std::abs(norm_power_check(st, 1, quad) - 1.0) < 1e-10);
      for (int s : {2, 3}) CHECK(norm_power_check(st, s, quad) <= 1.0 + 1e-9);
    }
  }
  CVector m0 = CVector::Zero(3);
  m0(1) = 1.0;
  CHECK(norm_power_check(SpinState(SpinSite::from_twice(2), m0), 2, quad) < 1.0 - 1e-3);
}

TEST_CASE("jensen bound") {
  const SphereQuadrature quad(128);
  std::mt19937_64 rng(29);
  const auto half = jensen_lower_bound_check(random_state(SpinSite::from_twice(1), rng), quad);
  CHECK(half.entropy == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(half.bound == doctest::Approx(std::log(1.5)));
  CHECK(half.holds());
  const auto coh = jensen_lower_bound_check(coherent_state(SpinSite::from_twice(2), 0.0, 0.0), quad);
  CHECK(coh.bound == doctest::Approx(std::log(5.0 / 3.0)));
  CHECK(coh.holds());
  for (int k = 0; k < 20; ++k) CHECK(jensen_lower_bound_check(random_state(SpinSite::from_twice(4), rng), quad).holds());
}

TEST_CASE("minimum search finds the coherent value") {
  for (int twice : {2, 3, 4}) {
    const double j = 0.5 * twice;
    const auto report = lieb_conjecture_scan(SpinSite::from_twice(twice));
    CAPTURE(twice);
    CHECK(report.coherent_value == doctest::Approx(coherent_value(j)));
    CHECK(report.min_entropy >= coherent_value(j) - 1e-7);
    CHECK(report.min_entropy <= coherent_value(j) + 1e-4);
    CHECK_FALSE(report.counterexample());
  }
}

TEST_CASE("near-coherent normalization is exact") {
  for (int twice : {2, 3, 4, 5}) {
    const double j = 0.5 * twice;
    for (double eps : {0.05, 0.1, 0.2}) {
      const auto mj = MajoranaState::from_points(SpinSite::from_twice(twice), perturbed_coherent(twice, eps));
      CHECK(std::abs(1.0 / mj.c() - (1.0 - (2.0 * j - 1.0) * eps / (2.0 * j))) < 1e-12);
    }
  }
}

namespace {

std::vector<double> perturbation_residuals(int twice) {
  const double j = 0.5 * twice;
  std::vector<double> out;
  for (double eps : {0.05, 0.1, 0.2}) {
    const auto mj = MajoranaState::from_points(SpinSite::from_twice(twice), perturbed_coherent(twice, eps));
    out.push_back(std::abs(wehrl_entropy_formula(mj) - coherent_value(j) - mj.c() / (8.0 * j * j) * eps * eps));
  }
  return out;
}

double fitted_exponent(const std::vector<double>& r) {
  const double x[3] = {std::log(0.05), std::log(0.1), std::log(0.2)};
  const double xm = (x[0] + x[1] + x[2]) / 3.0;
  double num = 0.0, den = 0.0;
  const double ym = (std::log(r[0]) + std::log(r[1]) + std::log(r[2])) / 3.0;
  for (int k = 0; k < 3; ++k) {
    num += (x[k] - xm) * (std::log(r[k]) - ym);
    den += (x[k] - xm) * (x[k] - xm);
  }
  return num / den;
}

}  // namespace

TEST_CASE("near-coherent expansion is second order with a vanishing remainder") {
  for (int twice : {2, 3, 4, 5}) {
    const auto r = perturbation_residuals(twice);
    CAPTURE(twice);
    CHECK(fitted_exponent(r) > 2.9);
  }
}

TEST_CASE("near-coherent expansion remainder is fourth order") {
  for (int twice : {2, 3, 4, 5}) {
    const auto r = perturbation_residuals(twice);
    CAPTURE(twice);
    CHECK(fitted_exponent(r) >= 3.5);
  }
}
