#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "physbench/core.hpp"

namespace pb::poly {

using Rational = boost::multiprecision::cpp_rational;

using Exponents = std::vector<int>;

[[nodiscard]] inline double to_double(double c) { return c; }
[[nodiscard]] inline double to_double(const Rational& c) { return c.convert_to<double>(); }

// Sparse multivariate polynomial. Coefficients are double or exact rationals.
template <class Coef>
class Polynomial {
 public:
  using Terms = std::map<Exponents, Coef>;

  explicit Polynomial(std::size_t n_vars = 0) : n_(n_vars) {}

  [[nodiscard]] static Polynomial constant(std::size_t n_vars, const Coef& c);
  [[nodiscard]] static Polynomial variable(std::size_t n_vars, std::size_t k);
  [[nodiscard]] static Polynomial monomial(const Exponents& e, const Coef& c);

  [[nodiscard]] std::size_t n_vars() const { return n_; }
  [[nodiscard]] const Terms& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] int degree() const;  // -1 for the zero polynomial
  [[nodiscard]] int degree_in(std::size_t k) const;
  [[nodiscard]] int lowest_degree_in(std::size_t k) const;  // -1 for zero

  void add_term(const Exponents& e, const Coef& c);

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Coef& c);
  [[nodiscard]] Polynomial operator-() const;

  [[nodiscard]] Polynomial derivative(std::size_t k) const;
  // Part of degree exactly `power` in variable k, with that variable removed.
  [[nodiscard]] Polynomial coefficient(std::size_t k, int power) const;
  // Drops every term whose degree in variable k exceeds max_degree.
  [[nodiscard]] Polynomial truncated(std::size_t k, int max_degree) const;
  // Same polynomial over n variables; dropped variables must not occur.
  [[nodiscard]] Polynomial with_vars(std::size_t n) const;

  [[nodiscard]] double evaluate(std::span<const double> x) const;
  [[nodiscard]] cplx evaluate(std::span<const cplx> x) const;

  [[nodiscard]] Polynomial<double> to_double() const;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

 private:
  std::size_t n_;
  Terms terms_;
};

template <class Coef>
[[nodiscard]] Polynomial<Coef> operator+(Polynomial<Coef> a, const Polynomial<Coef>& b) {
  a += b;
  return a;
}
template <class Coef>
[[nodiscard]] Polynomial<Coef> operator-(Polynomial<Coef> a, const Polynomial<Coef>& b) {
  a -= b;
  return a;
}
template <class Coef>
[[nodiscard]] Polynomial<Coef> operator*(const Polynomial<Coef>& a, const Polynomial<Coef>& b);
template <class Coef>
[[nodiscard]] Polynomial<Coef> operator*(const Coef& c, Polynomial<Coef> a) {
  a *= c;
  return a;
}

// Largest |coefficient| of a - b; zero iff equal.
[[nodiscard]] double max_coefficient_gap(const Polynomial<double>& a, const Polynomial<double>& b);

// Tensor-valued polynomial field on d coordinates. Rank 0 is a scalar, rank 1 a
// covector or vector, rank 2 a d x d or d x n matrix. Antisymmetric rank-2
// fields store the upper triangle and return -entry for i > j.
template <class Coef>
class PolyField {
 public:
  using Poly = Polynomial<Coef>;

  PolyField() = default;  // empty scalar-less placeholder
  [[nodiscard]] static PolyField scalar(std::size_t dim, Poly p);
  [[nodiscard]] static PolyField vector(std::size_t dim, std::vector<Poly> comps);
  [[nodiscard]] static PolyField matrix(std::size_t dim, std::size_t rows, std::size_t cols, std::vector<Poly> row_major);
  // `upper` lists the (i, j), i < j entries row by row.
  [[nodiscard]] static PolyField bivector(std::size_t dim, std::vector<Poly> upper);
  // Constant antisymmetric field; lower entries of `m` are ignored.
  [[nodiscard]] static PolyField constant_bivector(std::size_t dim, std::size_t n_vars, const std::vector<std::vector<Coef>>& m);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t rank() const { return shape_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }
  [[nodiscard]] bool antisymmetric() const { return antisym_; }
  [[nodiscard]] std::size_t n_vars() const { return n_vars_; }

  [[nodiscard]] const Poly& at() const;
  [[nodiscard]] const Poly& at(std::size_t i) const;
  [[nodiscard]] Poly at(std::size_t i, std::size_t j) const;

  // Componentwise derivative in coordinate k.
  [[nodiscard]] PolyField derivative(std::size_t k) const;
  [[nodiscard]] bool is_constant() const;

  [[nodiscard]] RVector evaluate_vector(std::span<const double> x) const;
  [[nodiscard]] RMatrix evaluate_matrix(std::span<const double> x) const;

  [[nodiscard]] PolyField<double> to_double() const;
  // Same field with every component moved to n polynomial variables.
  [[nodiscard]] PolyField with_vars(std::size_t n) const;
  // Componentwise a + c * b for fields of equal shape.
  [[nodiscard]] PolyField plus_scaled(const Coef& c, const PolyField& b) const;

 private:
  template <class>
  friend class PolyField;

  std::size_t dim_ = 0;
  std::size_t n_vars_ = 0;
  std::vector<std::size_t> shape_;
  bool antisym_ = false;
  std::vector<Poly> comps_;
};

// f_ij = d_i a_j - d_j a_i for a covector field a.
template <class Coef>
[[nodiscard]] PolyField<Coef> field_strength(const PolyField<Coef>& a);

// Poisson bracket theta^{ij} d_i f d_j g over the first dim variables.
template <class Coef>
[[nodiscard]] Polynomial<Coef> poisson_bracket(const PolyField<Coef>& theta, const Polynomial<Coef>& f,
                                               const Polynomial<Coef>& g);

using RPoly = Polynomial<Rational>;
using DPoly = Polynomial<double>;
using RField = PolyField<Rational>;
using DField = PolyField<double>;

}  // namespace pb::poly
