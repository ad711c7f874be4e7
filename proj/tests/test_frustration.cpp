#include <chrono>
#include <map>
#include <numeric>

#include "doctest.h"
#include "physbench/frustration.hpp"
#include "physbench/spinalg.hpp"
#include "support.hpp"

using namespace pb;
using namespace pb::frustration;
using pb::testing::max_abs;

namespace {

std::map<long, int> multiplicities(const RVector& values) {
  std::map<long, int> out;
  for (Eigen::Index k = 0; k < values.size(); ++k) ++out[std::lround(values(k) * 1e6)];
  return out;
}

}  // namespace

TEST_CASE("lattice geometry") {
  const auto p22 = build_checkerboard(2, 2, true, 0.5);
  CHECK(p22.lattice.n_sites() == 4);
  CHECK(p22.lattice.boxes().size() == 2);

  const auto p24 = build_checkerboard(2, 4, true, 0.5);
  CHECK(p24.lattice.n_sites() == 8);
  CHECK(p24.lattice.boxes().size() == 4);
  CHECK(p24.lattice.reflection().has_value());

  const auto open = build_checkerboard(2, 2, false, 0.5);
  CHECK(open.lattice.boxes().size() == 1);
  CHECK(open.lattice.bonds().size() == 6);

  CHECK_THROWS((void)build_checkerboard(3, 2, true, 0.5));
  CHECK_THROWS((void)build_checkerboard(2, 2, true, 0.7));
}

TEST_CASE("single box spectrum") {
  const auto box = build_checkerboard(2, 2, false, 0.5);
  const auto h = checkerboard_hamiltonian(box.lattice, box.space);
  const auto r = eigensolve(h, 16, Which::full);
  const auto m = multiplicities(r.eigenvalues);
  REQUIRE(m.size() == 3);
  CHECK(m.at(0) == 2);
  CHECK(m.at(1000000) == 9);
  CHECK(m.at(3000000) == 5);

  const auto report = ground_state_report(h, box.lattice, box.space);
  CHECK(report.degeneracy == 2);
  for (double s : report.stot) CHECK(std::abs(s) < 1e-10);
}

TEST_CASE("hamiltonian is half the squared box spin summed over boxes") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  SparseOperator direct = SparseOperator::zero(lat.space);
  for (const auto& box : lat.lattice.boxes()) {
    direct = direct + 0.5 * spinalg::spin_squared(std::span<const std::size_t>(box), lat.space);
  }
  CHECK((direct - checkerboard_hamiltonian(lat.lattice, lat.space)).max_abs_entry() < 1e-13);
}

TEST_CASE("field hamiltonian matches the zeeman form plus a constant") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  const double b = 0.3;
  const auto n_boxes = lat.lattice.boxes().size();
  const double lambda = static_cast<double>(lat.lattice.n_sites());
  const auto hb = checkerboard_hamiltonian(lat.lattice, lat.space, BoxFields::homogeneous(b, n_boxes));
  const auto h0 = checkerboard_hamiltonian(lat.lattice, lat.space);
  std::vector<std::size_t> all(lat.lattice.n_sites());
  std::iota(all.begin(), all.end(), 0);
  const auto s3 = spinalg::total_component(spinalg::Axis::z, all, lat.space);
  const auto expected = h0 - b * s3 + (lambda / 16.0) * b * b * SparseOperator::identity(lat.space);
  CHECK((hb - expected).max_abs_entry() < 1e-13);
}

TEST_CASE("periodic 2x2 has 2s+1 singlet ground states") {
  for (double s : {0.5, 1.0}) {
    const auto lat = build_checkerboard(2, 2, true, s);
    const auto report = ground_state_report(checkerboard_hamiltonian(lat.lattice, lat.space), lat.lattice, lat.space);
    CHECK(report.degeneracy == static_cast<Eigen::Index>(2 * s + 1));
    for (double v : report.stot) CHECK(std::abs(v) < 1e-10);
    CHECK(report.ice_rule_max_abs() < 1e-10);
  }
}

TEST_CASE("periodic 2x4 ground block is singlet and obeys the ice rule") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  const auto report = ground_state_report(checkerboard_hamiltonian(lat.lattice, lat.space), lat.lattice, lat.space);
  CHECK(report.degeneracy >= 1);
  for (double v : report.stot) CHECK(std::abs(v) < 1e-10);
  for (const auto& boxes : report.box_s3) {
    CHECK(boxes.size() == 4);
    for (double v : boxes) CHECK(std::abs(v) < 1e-10);
  }
  CHECK(report.ice_rule_max_abs() < 1e-10);
}

TEST_CASE("periodic lattices up to sixteen sites") {
  struct Case {
    int lx, ly;
    double s;
  };
  const Case cases[] = {{2, 2, 0.5}, {2, 4, 0.5}, {4, 2, 0.5}, {2, 6, 0.5}, {6, 2, 0.5}, {4, 4, 0.5},
                        {2, 8, 0.5}, {8, 2, 0.5}, {2, 2, 1.5}, {2, 4, 1.0}};
  for (const auto& c : cases) {
    const auto lat = build_checkerboard(c.lx, c.ly, true, c.s);
    const auto report = ground_state_report(checkerboard_hamiltonian(lat.lattice, lat.space), lat.lattice, lat.space);
    CAPTURE(c.lx);
    CAPTURE(c.ly);
    CAPTURE(c.s);
    REQUIRE_FALSE(report.stot.empty());
    for (double v : report.stot) CHECK(std::abs(v) < 1e-10);
    CHECK(report.ice_rule_max_abs() < 1e-8);
  }
}

TEST_CASE("magnetization sector solve agrees with the full space") {
  struct Case {
    int lx, ly;
    double s;
  };
  for (const auto& c : {Case{2, 2, 1.0}, Case{2, 2, 1.5}, Case{2, 4, 0.5}}) {
    const auto lat = build_checkerboard(c.lx, c.ly, true, c.s);
    const auto h = checkerboard_hamiltonian(lat.lattice, lat.space);
    GroundStateOptions full, sector;
    full.sector_threshold = lat.space.dim();
    sector.sector_threshold = 0;
    const auto a = ground_state_report(h, lat.lattice, lat.space, full);
    const auto b = ground_state_report(h, lat.lattice, lat.space, sector);
    CAPTURE(c.s);
    CHECK(std::abs(a.e0 - b.e0) < 1e-10);
    CHECK(a.degeneracy == b.degeneracy);
    CHECK_FALSE(a.sector_magnetization.has_value());
    REQUIRE(b.sector_magnetization.has_value());
    CHECK(std::abs(*b.sector_magnetization) <= 0.5);
  }
}

TEST_CASE("dimension cap is enforced") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  GroundStateOptions opt;
  opt.dimension_cap = 128;
  CHECK_THROWS_AS(
      (void)ground_state_report(checkerboard_hamiltonian(lat.lattice, lat.space), lat.lattice, lat.space, opt),
      DomainError);
}

TEST_CASE("coefficient matrices") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  const auto canon = canonical_state(lat.lattice, lat.space);
  CHECK(std::abs(canon.norm() - 1.0) < 1e-14);
  const auto cm = coefficient_matrix(canon, lat.lattice, lat.space);
  const CMatrix id = CMatrix::Identity(cm.c.rows(), cm.c.cols());
  CHECK(max_abs(cm.c - cm.c(0, 0) * id) < 1e-14);
  CHECK(std::abs(std::abs(canonical_spin_zero_overlap(canon, lat.lattice, lat.space)) - 1.0) < 1e-13);

  // Canonical state is a total singlet.
  const CVector applied = spinalg::total_spin_squared(lat.space).apply(canon);
  CHECK(applied.norm() < 1e-12);

  std::mt19937_64 rng(8);
  const CVector psi = pb::testing::random_unit_vector(static_cast<Eigen::Index>(lat.space.dim()), rng);
  const auto roundtrip = state_from_coefficients(coefficient_matrix(psi, lat.lattice, lat.space), lat.lattice, lat.space);
  CHECK((roundtrip - psi).norm() < 1e-13);
}

TEST_CASE("energy is invariant under transposing the coefficient matrix") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  const auto h = checkerboard_hamiltonian(lat.lattice, lat.space);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector psi = pb::testing::random_unit_vector(static_cast<Eigen::Index>(lat.space.dim()), rng);
    auto cm = coefficient_matrix(psi, lat.lattice, lat.space);
    cm.c.transposeInPlace();
    const CVector flipped = state_from_coefficients(cm, lat.lattice, lat.space);
    CHECK(std::abs(h.expectation(psi).real() - h.expectation(flipped).real()) < 1e-12);
  }
}

TEST_CASE("positivity upgrade never raises the energy") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  const auto h = checkerboard_hamiltonian(lat.lattice, lat.space);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector psi = pb::testing::random_unit_vector(static_cast<Eigen::Index>(lat.space.dim()), rng);
    const auto up = positivity_upgrade(psi, h, lat.lattice, lat.space);
    CHECK(up.energy_upgraded <= up.energy_input + 1e-12);
    CHECK(std::abs(up.upgraded_state.norm() - 1.0) < 1e-12);
  }

  const auto report = ground_state_report(h, lat.lattice, lat.space);
  const auto up = positivity_upgrade(report.ground_vectors.col(0), h, lat.lattice, lat.space);
  CHECK(std::abs(up.energy_upgraded - report.e0) < 1e-9);
}

TEST_CASE("ground block overlaps the canonical state") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  const auto report = ground_state_report(checkerboard_hamiltonian(lat.lattice, lat.space), lat.lattice, lat.space);
  double weight = 0.0;
  for (Eigen::Index k = 0; k < report.ground_vectors.cols(); ++k) {
    weight += std::norm(canonical_spin_zero_overlap(report.ground_vectors.col(k), lat.lattice, lat.space));
  }
  CHECK(weight > 1e-6);
}

TEST_CASE("richardson extrapolation of a quartic") {
  const auto f = [](double x) { return 1.0 + 3.0 * x * x + 0.7 * x * x * x * x; };
  const auto [est, err] = richardson_second_derivative(f, {0.2, 0.1, 0.05});
  CHECK(est == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(err < 1e-8);
}

TEST_CASE("susceptibility bounds on the 2x4 lattice") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  const auto report = susceptibility_check(lat.lattice, lat.space, {-0.2, -0.1, 0.1, 0.2});
  for (double r : report.bound_residuals) CHECK(r >= -1e-9);
  CHECK(report.chi_estimate <= 0.125 + 1e-6);
  CHECK(report.chi_local_estimate <= 0.25 + 1e-6);
  for (double r : report.local_residuals) CHECK(r >= -1e-9);
}

TEST_CASE("finite temperature free energy inequality") {
  const auto lat = build_checkerboard(2, 4, true, 0.5);
  const auto report = thermal_check(lat.lattice, lat.space, {0.5, 1.0, 2.0}, {-0.2, -0.1, 0.1, 0.2});
  CHECK(report.min_residual() >= -1e-9);
  for (double m : report.zero_field_magnetization) CHECK(std::abs(m) < 1e-10);

  const auto big = build_checkerboard(4, 4, true, 0.5);
  CHECK_THROWS((void)thermal_check(big.lattice, big.space, {1.0}, {0.1}));
}
