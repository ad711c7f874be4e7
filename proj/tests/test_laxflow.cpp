#include <random>

#include "doctest.h"
#include "physbench/laxflow.hpp"
#include "support.hpp"

using namespace pb;
using namespace pb::laxflow;
using pb::testing::max_abs;

namespace {

RMatrix near_identity(std::mt19937_64& rng, Eigen::Index n = 3, double spread = 0.3) {
  std::normal_distribution<double> normal;
  RMatrix m(n, n);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = spread * normal(rng);
  return m + RMatrix::Identity(n, n);
}

std::vector<double> tenth_ladder() {
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(0.1 * k);
  return t;
}

}  // namespace

TEST_CASE("gradient of power traces") {
  std::mt19937_64 rng(1);
  const RMatrix l = near_identity(rng);
  const auto id = Twist::identity(3);
  CHECK(max_abs(PowerTrace(1).gradient(l, id) - l) < 1e-15);
  for (int k : {2, 3}) {
    const PowerTrace h(k);
    const RMatrix g = h.gradient(l, id);
    CHECK(max_abs(g * l - l * g) < 1e-13);
  }
  // Directional derivative under the trace pairing.
  const PowerTrace h2(2);
  std::normal_distribution<double> normal;
  RMatrix dir(3, 3);
  for (Eigen::Index k = 0; k < 9; ++k) dir.data()[k] = normal(rng);
  const double step = 1e-5;
  const double fd = (h2.value(l + step * dir, id) - h2.value(l - step * dir, id)) / (2 * step);
  const double pairing = (h2.gradient(l, id) * l.inverse() * dir).trace();
  CHECK(std::abs(fd - pairing) < 1e-6);

  CHECK_THROWS_AS((void)PowerTrace(0), DomainError);
  CHECK_THROWS_AS((void)h2.gradient(RMatrix::Zero(3, 3), id), SingularError);
}

TEST_CASE("projections split a matrix") {
  std::mt19937_64 rng(2);
  const RMatrix x = near_identity(rng, 4, 1.0);
  CHECK(max_abs(project_plus(x) + project_minus(x) - x) < 1e-15);
  const RMatrix p = project_plus(x);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < i; ++j) CHECK(p(i, j) == 0.0);
  }
}

TEST_CASE("factorization") {
  const auto eye = factorize(RMatrix::Identity(3, 3));
  CHECK(max_abs(eye.g_minus - RMatrix::Identity(3, 3)) < 1e-15);
  CHECK(max_abs(eye.g_plus - RMatrix::Identity(3, 3)) < 1e-15);

  RMatrix upper = RMatrix::Identity(3, 3);
  upper(0, 1) = 0.4;
  upper(0, 2) = -1.2;
  upper(1, 2) = 2.0;
  const auto up = factorize(upper);
  CHECK(max_abs(up.g_minus - RMatrix::Identity(3, 3)) < 1e-15);
  CHECK(max_abs(up.g_plus - upper) < 1e-15);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = factorize(near_identity(rng, 3, 0.2));
    CHECK(f.residual < 1e-12);
    for (int i = 0; i < 3; ++i) {
      CHECK(f.g_minus(i, i) * f.g_plus(i, i) == doctest::Approx(1.0));
      for (int j = i + 1; j < 3; ++j) {
        CHECK(f.g_minus(i, j) == 0.0);
        CHECK(f.g_plus(j, i) == 0.0);
      }
    }
  }

  RMatrix bad = RMatrix::Identity(2, 2);
  bad(0, 0) = 0.0;
  bad(0, 1) = bad(1, 0) = 1.0;
  CHECK_THROWS_AS((void)factorize(bad), DomainError);
}

TEST_CASE("flow starts at the initial matrix") {
  std::mt19937_64 rng(4);
  const auto sys = make_system(near_identity(rng), 2, Twist::identity(3));
  const auto tr = lax_solve_by_factorization(sys, {0.0});
  CHECK(max_abs(tr.states[0] - sys.l0) < 1e-14);
  CHECK(max_abs(lax_ode_reference(sys, 0.0) - sys.l0) < 1e-15);
}

TEST_CASE("symmetric sl(2) flow keeps the spectrum") {
  RMatrix l0(2, 2);
  l0 << 0.0, 1.0, 1.0, 0.0;
  const auto sys = make_system(l0, 2, Twist::identity(2));
  const auto tr = lax_solve_by_factorization(sys, {0.2, 0.5, 1.0});
  for (const auto& l : tr.states) {
    const RVector s = sorted_real_spectrum(l);
    CHECK(s(0) == doctest::Approx(-1.0));
    CHECK(s(1) == doctest::Approx(1.0));
  }
}

TEST_CASE("factorization solution matches the ODE reference") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const RMatrix l0 = near_identity(rng);
    for (int k : {2, 3}) {
      const auto sys = make_system(l0, k, Twist::identity(3));
      const auto times = tenth_ladder();
      const auto tr = lax_solve_by_factorization(sys, times);
      CHECK(tr.branch_gap < 1e-9);
      for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(max_abs(tr.states[i] - lax_ode_reference(sys, times[i])) < 1e-6);
        CHECK(spectrum_distance(tr.states[i], l0) < 1e-8);
      }
    }
  }
}

TEST_CASE("commuting flows") {
  std::mt19937_64 rng(6);
  const RMatrix l0 = near_identity(rng);
  const auto id = Twist::identity(3);
  const RMatrix a = lax_ode_reference(make_system(lax_ode_reference(make_system(l0, 2, id), 0.4), 3, id), 0.3);
  const RMatrix b = lax_ode_reference(make_system(lax_ode_reference(make_system(l0, 3, id), 0.3), 2, id), 0.4);
  CHECK(max_abs(a - b) < 1e-6);
}

TEST_CASE("twisted flows keep the twisted invariant") {
  std::mt19937_64 rng(7);
  RVector d(3);
  d << 1.2, 0.8, 1.1;
  const std::vector<Twist> twists{Twist::diagonal(d), Twist::permutation({2, 1, 0}), Twist::permutation({1, 2, 0})};
  CHECK(twists[0].preserves_splitting());
  CHECK_FALSE(twists[1].preserves_splitting());
  CHECK(Twist::identity(3).preserves_splitting());
  for (int trial = 0; trial < 3; ++trial) {
    const RMatrix l0 = near_identity(rng);
    for (const auto& tw : twists) {
      const auto sys = make_system(l0, 2, tw);
      const std::vector<double> times{0.25, 0.5, 1.0};
      const auto tr = lax_solve_by_factorization(sys, times);
      CHECK(tr.branch_gap < 1e-9);
      for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(sys.hamiltonian.value(tr.states[i], tw) - sys.hamiltonian.value(l0, tw)) < 1e-9);
        CHECK(max_abs(tr.states[i] - lax_ode_reference(sys, times[i])) < 1e-6);
      }
    }
  }
  CHECK_THROWS((void)Twist::permutation({0, 0, 1}));
}

TEST_CASE("system validation") {
  CHECK_THROWS_AS((void)make_system(RMatrix::Zero(2, 2), 2, Twist::identity(2)), SingularError);
  CHECK_THROWS_AS((void)make_system(RMatrix::Identity(2, 2), 2, Twist::identity(3)), ShapeError);
}
