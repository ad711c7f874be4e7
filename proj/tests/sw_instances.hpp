#pragma once

#include <vector>

#include "physbench/swmap.hpp"

namespace pb::testing {

using poly::Exponents;
using poly::Rational;
using poly::RField;
using poly::RPoly;

inline RPoly mono(std::size_t n_vars, Exponents e, const Rational& c) {
  e.resize(n_vars, 0);
  return RPoly::monomial(e, c);
}

struct PlaneInstance {
  RField theta;
  RField potential;
  RPoly gauge;
};

// Constant bivector 1/2 with a potential of constant field strength 3/5.
inline PlaneInstance constant_plane() {
  const Rational th(1, 2), f(3, 5);
  return {RField::bivector(2, {RPoly::constant(2, th)}),
          RField::vector(2, {mono(2, {0, 1}, -f / 2), mono(2, {1, 0}, f / 2)}),
          mono(2, {1, 0}, Rational(1, 3))};
}

// Non-constant bivector (always Poisson in two dimensions) with quadratic data.
inline PlaneInstance polynomial_plane() {
  return {RField::bivector(2, {RPoly::constant(2, 1) + mono(2, {2, 0}, Rational(1, 4)) + mono(2, {1, 1}, Rational(1, 5))}),
          RField::vector(2, {mono(2, {0, 1}, Rational(1, 3)) + mono(2, {1, 1}, Rational(1, 4)),
                             mono(2, {1, 0}, Rational(-1, 5)) + mono(2, {2, 0}, Rational(1, 6))}),
          mono(2, {1, 1}, Rational(1, 3)) + mono(2, {0, 2}, Rational(1, 5)) + mono(2, {1, 0}, Rational(1, 7))};
}

inline std::vector<RVector> plane_samples() {
  std::vector<RVector> out;
  for (const auto& [x, y] : {std::pair{0.3, -0.2}, std::pair{-0.5, 0.4}, std::pair{0.1, 0.7}}) {
    RVector v(2);
    v << x, y;
    out.push_back(v);
  }
  return out;
}

// Every monomial x^i y^j with i + j <= max_degree, on two coordinates plus the deformation variable.
inline std::vector<RPoly> moyal_basis(int max_degree) {
  std::vector<RPoly> out;
  for (int d = 0; d <= max_degree; ++d) {
    for (int i = 0; i <= d; ++i) out.push_back(mono(3, {i, d - i}, 1));
  }
  return out;
}

}  // namespace pb::testing
