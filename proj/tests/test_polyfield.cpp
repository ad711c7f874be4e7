#include "doctest.h"
#include "physbench/polyfield.hpp"
#include "sw_instances.hpp"

using namespace pb;
using namespace pb::poly;
using pb::testing::mono;

TEST_CASE("polynomial arithmetic") {
  const auto x = RPoly::variable(2, 0);
  const auto y = RPoly::variable(2, 1);
  const auto one = RPoly::constant(2, 1);
  const auto p = (x + y) * (x - y);
  CHECK(p == x * x - y * y);
  CHECK(p.degree() == 2);
  CHECK((p - p).is_zero());
  CHECK((p - p).degree() == -1);
  CHECK(one.is_constant());
  CHECK((Rational(1, 3) * x).terms().at({1, 0}) == Rational(1, 3));
  CHECK((-x + x).is_zero());

  const auto q = mono(2, {3, 1}, Rational(2, 7)) + x;
  CHECK(q.degree_in(0) == 3);
  CHECK(q.lowest_degree_in(0) == 1);
  CHECK(q.derivative(0) == mono(2, {2, 1}, Rational(6, 7)) + one);
  CHECK(q.derivative(1) == mono(2, {3, 0}, Rational(2, 7)));
  CHECK(q.coefficient(0, 3) == mono(2, {0, 1}, Rational(2, 7)));
  CHECK(q.truncated(0, 2) == x);

  const double pt[2] = {0.5, -2.0};
  CHECK(q.evaluate(std::span<const double>(pt, 2)) == doctest::Approx(2.0 / 7.0 * 0.125 * -2.0 + 0.5));
  const cplx zp[2] = {cplx(0.0, 1.0), 1.0};
  CHECK(std::abs(q.evaluate(std::span<const cplx>(zp, 2)) - (2.0 / 7.0 * cplx(0.0, -1.0) + cplx(0.0, 1.0))) < 1e-15);

  CHECK(max_coefficient_gap(q.to_double(), q.to_double()) == 0.0);
  CHECK_THROWS_AS((void)(x + RPoly::variable(3, 0)), ShapeError);
  CHECK_THROWS_AS((void)RPoly::monomial({-1, 0}, 1), DomainError);
  CHECK_THROWS_AS((void)y.with_vars(1), DomainError);
  CHECK(x.with_vars(1) == RPoly::variable(1, 0));
  CHECK(RPoly::variable(2, 0).with_vars(3) == RPoly::variable(3, 0));
}

TEST_CASE("fields and brackets") {
  const auto x = RPoly::variable(2, 0);
  const auto y = RPoly::variable(2, 1);
  const auto theta = RField::bivector(2, {RPoly::constant(2, 1)});
  CHECK(theta.at(1, 0) == -RPoly::constant(2, 1));
  CHECK(theta.at(0, 0).is_zero());
  CHECK(poisson_bracket(theta, x, y) == RPoly::constant(2, 1));
  CHECK(poisson_bracket(theta, y, x) == -RPoly::constant(2, 1));
  CHECK(poisson_bracket(theta, x * y, x) == -x);

  const auto a = RField::vector(2, {-Rational(1, 2) * y, Rational(1, 2) * x});
  const auto f = field_strength(a);
  CHECK(f.antisymmetric());
  CHECK(f.at(0, 1) == RPoly::constant(2, 1));
  CHECK(f.is_constant());

  const double pt[2] = {0.2, 0.4};
  const RMatrix m = theta.evaluate_matrix(std::span<const double>(pt, 2));
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == -1.0);
  const RVector v = a.evaluate_vector(std::span<const double>(pt, 2));
  CHECK(v(0) == doctest::Approx(-0.2));

  const auto sum = a.plus_scaled(Rational(2), a);
  CHECK(sum.at(1) == Rational(3, 2) * x);
  CHECK_THROWS_AS((void)RField::bivector(3, {x}), ShapeError);
  CHECK_THROWS_AS((void)field_strength(theta), ShapeError);
}
