#include <algorithm>
#include <random>

#include "doctest.h"
#include "physbench/eigensolve.hpp"
#include "physbench/hubbard.hpp"
#include "support.hpp"

using namespace pb;
using namespace pb::hubbard;
using pb::testing::max_abs;

namespace {

std::vector<double> sorted_spectrum(const SparseOperator& h) {
  const auto r = eigensolve(h, h.dim(), Which::full);
  return {r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size()};
}

HsymParams random_hsym(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HsymParams p;
  p.u = u(rng);
  p.mu = u(rng);
  p.t = u(rng);
  p.r = u(rng);
  p.s = u(rng);
  p.z = cplx(u(rng), u(rng));
  return p;
}

}  // namespace

TEST_CASE("single site spectrum") {
  const FermiSpace one(1);
  const auto spec = sorted_spectrum(standard_hubbard({.u = 1.5, .mu = 0.4, .t = 0.0}, one, false));
  std::vector<double> expected{0.0, -0.4, -0.4, 1.5 - 0.8};
  std::sort(expected.begin(), expected.end());
  for (std::size_t k = 0; k < 4; ++k) CHECK(spec[k] == doctest::Approx(expected[k]));
}

TEST_CASE("decoupled pair spectrum is a sum of site spectra") {
  const FermiSpace two(2);
  const auto spec = sorted_spectrum(standard_hubbard({.u = 1.5, .mu = 0.4, .t = 0.0}, two, false));
  const std::vector<double> site{0.0, -0.4, -0.4, 0.7};
  std::vector<double> sums;
  for (double a : site) {
    for (double b : site) sums.push_back(a + b);
  }
  std::sort(sums.begin(), sums.end());
  for (std::size_t k = 0; k < 16; ++k) CHECK(spec[k] == doctest::Approx(sums[k]));
}

TEST_CASE("free fermion pair ground energy") {
  for (auto signs : {SiteSigns::commuting, SiteSigns::jordan_wigner}) {
    const FermiSpace two(2, signs);
    const auto spec = sorted_spectrum(standard_hubbard({.u = 0.0, .mu = 0.0, .t = 1.0}, two, false));
    CHECK(spec.front() == doctest::Approx(-2.0));
  }
}

TEST_CASE("hamiltonian is hermitian") {
  const FermiSpace three(3);
  const auto h = standard_hubbard({.u = 1.0, .mu = 0.2, .t = 0.7}, three, true);
  const CMatrix d = h.to_dense();
  CHECK(max_abs(d - d.adjoint()) < 1e-15);
}

TEST_CASE("local generators") {
  const FermiSpace one(1);
  const auto g = symmetry_generators(one);
  const auto nu = one.number(0, Spin::up).to_dense();
  const auto nd = one.number(0, Spin::down).to_dense();
  const CMatrix id = CMatrix::Identity(4, 4);
  CHECK(max_abs(g.spin.h.to_dense() - (nu - nd)) < 1e-15);
  CHECK(max_abs(g.pseudo.h.to_dense() - (nu + nd - id)) < 1e-15);
  const CMatrix hs = g.pseudo.h.to_dense();
  const CMatrix hm = g.spin.h.to_dense();
  CHECK(max_abs(hs * hs + hm * hm - id) < 1e-15);
}

TEST_CASE("su(2) relations and orthogonality") {
  for (std::size_t n : {1u, 2u, 3u}) {
    for (auto signs : {SiteSigns::commuting, SiteSigns::jordan_wigner}) {
      const FermiSpace fs(n, signs);
      const auto g = symmetry_generators(fs);
      CHECK(su2_residual(g.spin) < 1e-12);
      CHECK(su2_residual(g.pseudo) < 1e-12);
      for (const auto* a : {&g.spin.plus, &g.spin.minus, &g.spin.h}) {
        for (const auto* b : {&g.pseudo.plus, &g.pseudo.minus, &g.pseudo.h}) {
          CHECK(commutator(*a, *b).max_abs_entry() < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("half filling commutation") {
  for (std::size_t n : {2u, 3u}) {
    const FermiSpace fs(n);
    const auto g = symmetry_generators(fs);
    const auto report = commutation_report(standard_hubbard({.u = 2.0, .mu = 1.0, .t = 0.7}, fs, false), g);
    CHECK(report.size() == 6);
    CHECK(max_commutator(report) < 1e-12);
  }
  const FermiSpace two(2);
  const auto g = symmetry_generators(two);
  const auto off = commutation_report(standard_hubbard({.u = 2.0, .mu = 0.3, .t = 0.7}, two, false), g);
  CHECK(off.at("pseudo_plus") > 1e-3);

  const auto local = commutation_report(standard_hubbard({.u = 3.0, .mu = 1.5, .t = 0.0}, two, false), g);
  CHECK(max_commutator(local) < 1e-12);
}

TEST_CASE("symmetric model reduces to the standard one") {
  const FermiSpace two(2);
  HsymParams p;
  p.u = 2.0;
  p.mu = 1.0;
  p.t = 0.6;
  const auto diff = hsym_hamiltonian(p, two, false) - standard_hubbard({.u = 2.0, .mu = 1.0, .t = 0.6}, two, false);
  CHECK(diff.max_abs_entry() < 1e-14);
}

TEST_CASE("symmetric model commutes exactly on the symmetry surface") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> shift(0.05, 0.5);
  const FermiSpace two(2);
  const auto g = symmetry_generators(two);
  for (int draw = 0; draw < 50; ++draw) {
    auto p = random_hsym(rng);
    p.e = 1.0;
    const bool on_surface = draw % 2 == 0;
    p.v = p.r + p.s + p.u - 2.0 * p.mu + (on_surface ? 0.0 : shift(rng));
    const double norm = max_commutator(commutation_report(hsym_hamiltonian(p, two, false), g));
    CAPTURE(draw);
    if (on_surface) CHECK(norm < 1e-10);
    else CHECK(norm > 1e-10);
  }
}

TEST_CASE("symmetric model on rings and open chains") {
  std::mt19937_64 rng(7);
  const FermiSpace three(3);
  const auto g = symmetry_generators(three);
  for (int draw = 0; draw < 5; ++draw) {
    auto ring = random_hsym(rng);
    ring.v = symmetric_v(ring, 2.0);
    CHECK(max_commutator(commutation_report(hsym_hamiltonian(ring, three, true), g)) < 1e-10);
  }
  auto half = random_hsym(rng);
  half.mu = 0.5 * half.u;
  half.v = half.r + half.s;
  CHECK(max_commutator(commutation_report(hsym_hamiltonian(half, three, false), g)) < 1e-10);
  CHECK_THROWS_AS((void)symmetric_v(half, 0.5), DomainError);
}

TEST_CASE("particle hole exchange swaps the two algebras") {
  for (std::size_t n : {1u, 2u, 3u}) {
    const FermiSpace fs(n);
    const auto g = symmetry_generators(fs);
    const CMatrix u = particle_hole_down(fs).to_dense();
    CHECK(max_abs(u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols())) < 1e-12);
    const auto conj = [&](const SparseOperator& op) { return CMatrix(u * op.to_dense() * u.adjoint()); };
    CHECK(max_abs(conj(g.spin.h) - g.pseudo.h.to_dense()) < 1e-12);
    const bool plus_to_plus = max_abs(conj(g.spin.plus) - g.pseudo.plus.to_dense()) < 1e-12 ||
                              max_abs(conj(g.spin.plus) + g.pseudo.plus.to_dense()) < 1e-12;
    CHECK(plus_to_plus);
  }
}

TEST_CASE("twist operator") {
  const auto trivial = twist_operator_check(1.0);
  CHECK(trivial.coproduct_plus < 1e-15);
  CHECK(trivial.mm_star_printed < 1e-15);

  for (double q : {0.5, 2.0, 3.7}) {
    const auto r = twist_operator_check(q);
    CAPTURE(q);
    CHECK(r.alpha * r.alpha - r.beta * r.beta == doctest::Approx(1.0));
    CHECK(r.coproduct_plus < 1e-12);
    CHECK(r.coproduct_minus < 1e-12);
    CHECK(r.coproduct_h < 1e-12);
    CHECK(r.xi_projector < 1e-12);
    CHECK(r.xi_closed_form < 1e-12);
    CHECK(r.mm_star_actual < 1e-12);
    // The opposite branch of beta does not intertwine the coproducts.
    CHECK(r.coproduct_literal_sign > 1e-3);
  }
  CHECK_THROWS_AS((void)twist_operator_check(0.0), DomainError);
  CHECK_THROWS_AS((void)twist_operator_check(-1.0), DomainError);
}
