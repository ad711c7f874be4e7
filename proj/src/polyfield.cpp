#include "physbench/polyfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pb::poly {

namespace {

template <class Coef>
bool is_zero_coef(const Coef& c) {
  return c == Coef(0);
}

template <class T>
T power(T base, int e) {
  T out(1.0);
  for (int k = 0; k < e; ++k) out *= base;
  return out;
}

template <class Coef, class Value>
Value evaluate_terms(const typename Polynomial<Coef>::Terms& terms, std::size_t n, std::span<const Value> x) {
  if (x.size() != n) throw ShapeError("point dimension does not match the number of variables");
  Value sum(0.0);
  for (const auto& [e, c] : terms) {
    Value term(to_double(c));
    for (std::size_t k = 0; k < n; ++k) {
      if (e[k] != 0) term *= power(x[k], e[k]);
    }
    sum += term;
  }
  return sum;
}

}  // namespace

template <class Coef>
Polynomial<Coef> Polynomial<Coef>::constant(std::size_t n_vars, const Coef& c) {
  Polynomial p(n_vars);
  p.add_term(Exponents(n_vars, 0), c);
  return p;
}

template <class Coef>
Polynomial<Coef> Polynomial<Coef>::variable(std::size_t n_vars, std::size_t k) {
  if (k >= n_vars) throw DomainError("variable index out of range");
  Exponents e(n_vars, 0);
  e[k] = 1;
  Polynomial p(n_vars);
  p.add_term(e, Coef(1));
  return p;
}

template <class Coef>
Polynomial<Coef> Polynomial<Coef>::monomial(const Exponents& e, const Coef& c) {
  Polynomial p(e.size());
  p.add_term(e, c);
  return p;
}

template <class Coef>
bool Polynomial<Coef>::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) {
    return std::all_of(t.first.begin(), t.first.end(), [](int v) { return v == 0; });
  });
}

template <class Coef>
int Polynomial<Coef>::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    d = std::max(d, s);
  }
  return d;
}

template <class Coef>
int Polynomial<Coef>::degree_in(std::size_t k) const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.at(k));
  return d;
}

template <class Coef>
int Polynomial<Coef>::lowest_degree_in(std::size_t k) const {
  if (terms_.empty()) return -1;
  int d = terms_.begin()->first.at(k);
  for (const auto& [e, c] : terms_) d = std::min(d, e.at(k));
  return d;
}

template <class Coef>
void Polynomial<Coef>::add_term(const Exponents& e, const Coef& c) {
  if (e.size() != n_) throw ShapeError("monomial has the wrong number of variables");
  if (std::any_of(e.begin(), e.end(), [](int v) { return v < 0; })) throw DomainError("negative exponent");
  if (is_zero_coef(c)) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (is_zero_coef(it->second)) terms_.erase(it);
}

template <class Coef>
Polynomial<Coef>& Polynomial<Coef>::operator+=(const Polynomial& o) {
  if (o.n_ != n_) throw ShapeError("polynomials live on different variable sets");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

template <class Coef>
Polynomial<Coef>& Polynomial<Coef>::operator-=(const Polynomial& o) {
  if (o.n_ != n_) throw ShapeError("polynomials live on different variable sets");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

template <class Coef>
Polynomial<Coef>& Polynomial<Coef>::operator*=(const Coef& c) {
  if (is_zero_coef(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

template <class Coef>
Polynomial<Coef> Polynomial<Coef>::operator-() const {
  Polynomial out = *this;
  for (auto& [e, v] : out.terms_) v = -v;
  return out;
}

template <class Coef>
Polynomial<Coef> operator*(const Polynomial<Coef>& a, const Polynomial<Coef>& b) {
  if (a.n_vars() != b.n_vars()) throw ShapeError("polynomials live on different variable sets");
  Polynomial<Coef> out(a.n_vars());
  Exponents e(a.n_vars());
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

template <class Coef>
Polynomial<Coef> Polynomial<Coef>::derivative(std::size_t k) const {
  if (k >= n_) throw DomainError("variable index out of range");
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponents d = e;
    d[k] -= 1;
    out.add_term(d, c * Coef(e[k]));
  }
  return out;
}

template <class Coef>
Polynomial<Coef> Polynomial<Coef>::coefficient(std::size_t k, int pw) const {
  if (k >= n_) throw DomainError("variable index out of range");
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[k] != pw) continue;
    Exponents d = e;
    d[k] = 0;
    out.add_term(d, c);
  }
  return out;
}

template <class Coef>
Polynomial<Coef> Polynomial<Coef>::truncated(std::size_t k, int max_degree) const {
  if (k >= n_) throw DomainError("variable index out of range");
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[k] <= max_degree) out.terms_.emplace(e, c);
  }
  return out;
}

template <class Coef>
Polynomial<Coef> Polynomial<Coef>::with_vars(std::size_t n) const {
  Polynomial out(n);
  for (const auto& [e, c] : terms_) {
    Exponents d(n, 0);
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (k < n) {
        d[k] = e[k];
      } else if (e[k] != 0) {
        throw DomainError("cannot drop a variable that occurs in the polynomial");
      }
    }
    out.add_term(d, c);
  }
  return out;
}

template <class Coef>
double Polynomial<Coef>::evaluate(std::span<const double> x) const {
  return evaluate_terms<Coef, double>(terms_, n_, x);
}

template <class Coef>
cplx Polynomial<Coef>::evaluate(std::span<const cplx> x) const {
  return evaluate_terms<Coef, cplx>(terms_, n_, x);
}

template <class Coef>
Polynomial<double> Polynomial<Coef>::to_double() const {
  Polynomial<double> out(n_);
  for (const auto& [e, c] : terms_) out.add_term(e, poly::to_double(c));
  return out;
}

template <class Coef>
std::string Polynomial<Coef>::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c << ")";
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 1) os << "*x" << k;
      if (e[k] > 1) os << "*x" << k << "^" << e[k];
    }
  }
  return os.str();
}

double max_coefficient_gap(const Polynomial<double>& a, const Polynomial<double>& b) {
  const Polynomial<double> d = a - b;
  double m = 0.0;
  for (const auto& [e, c] : d.terms()) m = std::max(m, std::abs(c));
  return m;
}

// ---- PolyField ----

namespace {

template <class Poly>
std::size_t common_vars(const std::vector<Poly>& comps, std::size_t dim) {
  if (comps.empty()) return dim;
  const std::size_t n = comps.front().n_vars();
  for (const auto& p : comps) {
    if (p.n_vars() != n) throw ShapeError("field components live on different variable sets");
  }
  if (n < dim) throw ShapeError("field components have fewer variables than coordinates");
  return n;
}

}  // namespace

template <class Coef>
PolyField<Coef> PolyField<Coef>::scalar(std::size_t dim, Poly p) {
  PolyField f;
  f.dim_ = dim;
  f.comps_ = {std::move(p)};
  f.n_vars_ = common_vars(f.comps_, dim);
  return f;
}

template <class Coef>
PolyField<Coef> PolyField<Coef>::vector(std::size_t dim, std::vector<Poly> comps) {
  PolyField f;
  f.dim_ = dim;
  f.shape_ = {comps.size()};
  f.comps_ = std::move(comps);
  f.n_vars_ = common_vars(f.comps_, dim);
  return f;
}

template <class Coef>
PolyField<Coef> PolyField<Coef>::matrix(std::size_t dim, std::size_t rows, std::size_t cols, std::vector<Poly> row_major) {
  if (row_major.size() != rows * cols) throw ShapeError("matrix field needs rows * cols components");
  PolyField f;
  f.dim_ = dim;
  f.shape_ = {rows, cols};
  f.comps_ = std::move(row_major);
  f.n_vars_ = common_vars(f.comps_, dim);
  return f;
}

template <class Coef>
PolyField<Coef> PolyField<Coef>::bivector(std::size_t dim, std::vector<Poly> upper) {
  if (upper.size() != dim * (dim - 1) / 2) throw ShapeError("bivector needs d(d-1)/2 upper entries");
  PolyField f;
  f.dim_ = dim;
  f.shape_ = {dim, dim};
  f.antisym_ = true;
  f.comps_ = std::move(upper);
  f.n_vars_ = common_vars(f.comps_, dim);
  return f;
}

template <class Coef>
PolyField<Coef> PolyField<Coef>::constant_bivector(std::size_t dim, std::size_t n_vars,
                                                   const std::vector<std::vector<Coef>>& m) {
  if (m.size() != dim) throw ShapeError("constant bivector has the wrong size");
  std::vector<Poly> upper;
  for (std::size_t i = 0; i < dim; ++i) {
    if (m[i].size() != dim) throw ShapeError("constant bivector has the wrong size");
    for (std::size_t j = i + 1; j < dim; ++j) upper.push_back(Poly::constant(n_vars, m[i][j]));
  }
  PolyField f = bivector(dim, std::move(upper));
  f.n_vars_ = n_vars;
  return f;
}

template <class Coef>
const Polynomial<Coef>& PolyField<Coef>::at() const {
  if (rank() != 0) throw ShapeError("field is not a scalar");
  return comps_.front();
}

template <class Coef>
const Polynomial<Coef>& PolyField<Coef>::at(std::size_t i) const {
  if (rank() != 1) throw ShapeError("field is not rank one");
  return comps_.at(i);
}

template <class Coef>
Polynomial<Coef> PolyField<Coef>::at(std::size_t i, std::size_t j) const {
  if (rank() != 2) throw ShapeError("field is not rank two");
  if (i >= shape_[0] || j >= shape_[1]) throw ShapeError("index out of range");
  if (!antisym_) return comps_[i * shape_[1] + j];
  if (i == j) return Poly(n_vars_);
  const std::size_t lo = std::min(i, j);
  const std::size_t hi = std::max(i, j);
  const std::size_t d = dim_;
  const std::size_t idx = lo * d - lo * (lo + 1) / 2 + (hi - lo - 1);
  return i < j ? comps_[idx] : -comps_[idx];
}

template <class Coef>
PolyField<Coef> PolyField<Coef>::derivative(std::size_t k) const {
  if (k >= dim_) throw DomainError("coordinate index out of range");
  PolyField out = *this;
  for (auto& c : out.comps_) c = c.derivative(k);
  return out;
}

template <class Coef>
bool PolyField<Coef>::is_constant() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const Poly& p) { return p.is_constant(); });
}

template <class Coef>
RVector PolyField<Coef>::evaluate_vector(std::span<const double> x) const {
  if (rank() != 1) throw ShapeError("field is not rank one");
  RVector out(static_cast<Eigen::Index>(comps_.size()));
  for (std::size_t i = 0; i < comps_.size(); ++i) out(static_cast<Eigen::Index>(i)) = comps_[i].evaluate(x);
  return out;
}

template <class Coef>
RMatrix PolyField<Coef>::evaluate_matrix(std::span<const double> x) const {
  if (rank() != 2) throw ShapeError("field is not rank two");
  const auto rows = static_cast<Eigen::Index>(shape_[0]);
  const auto cols = static_cast<Eigen::Index>(shape_[1]);
  RMatrix out = RMatrix::Zero(rows, cols);
  if (antisym_) {
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = i + 1; j < cols; ++j) {
        out(i, j) = comps_[idx++].evaluate(x);
        out(j, i) = -out(i, j);
      }
    }
    return out;
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = comps_[static_cast<std::size_t>(i * cols + j)].evaluate(x);
  }
  return out;
}

template <class Coef>
PolyField<double> PolyField<Coef>::to_double() const {
  PolyField<double> out;
  out.dim_ = dim_;
  out.n_vars_ = n_vars_;
  out.shape_ = shape_;
  out.antisym_ = antisym_;
  for (const auto& c : comps_) out.comps_.push_back(c.to_double());
  return out;
}

template <class Coef>
PolyField<Coef> PolyField<Coef>::with_vars(std::size_t n) const {
  if (n < dim_) throw ShapeError("fewer variables than coordinates");
  PolyField out = *this;
  out.n_vars_ = n;
  for (auto& c : out.comps_) c = c.with_vars(n);
  return out;
}

template <class Coef>
PolyField<Coef> PolyField<Coef>::plus_scaled(const Coef& c, const PolyField& b) const {
  if (b.shape_ != shape_ || b.antisym_ != antisym_ || b.n_vars_ != n_vars_) throw ShapeError("fields differ in shape");
  PolyField out = *this;
  for (std::size_t k = 0; k < comps_.size(); ++k) out.comps_[k] += c * b.comps_[k];
  return out;
}

template <class Coef>
PolyField<Coef> field_strength(const PolyField<Coef>& a) {
  if (a.rank() != 1 || a.shape()[0] != a.dim()) throw ShapeError("field strength needs a covector field");
  const std::size_t d = a.dim();
  std::vector<Polynomial<Coef>> upper;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) upper.push_back(a.at(j).derivative(i) - a.at(i).derivative(j));
  }
  if (upper.empty()) return PolyField<Coef>::bivector(d, {});
  return PolyField<Coef>::bivector(d, std::move(upper));
}

template <class Coef>
Polynomial<Coef> poisson_bracket(const PolyField<Coef>& theta, const Polynomial<Coef>& f, const Polynomial<Coef>& g) {
  const std::size_t d = theta.dim();
  Polynomial<Coef> out(f.n_vars());
  std::vector<Polynomial<Coef>> df, dg;
  for (std::size_t i = 0; i < d; ++i) {
    df.push_back(f.derivative(i));
    dg.push_back(g.derivative(i));
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (df[i].is_zero()) continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j || dg[j].is_zero()) continue;
      out += theta.at(i, j) * df[i] * dg[j];
    }
  }
  return out;
}

template class Polynomial<double>;
template class Polynomial<Rational>;
template Polynomial<double> operator*(const Polynomial<double>&, const Polynomial<double>&);
template Polynomial<Rational> operator*(const Polynomial<Rational>&, const Polynomial<Rational>&);
template class PolyField<double>;
template class PolyField<Rational>;
template PolyField<double> field_strength(const PolyField<double>&);
template PolyField<Rational> field_strength(const PolyField<Rational>&);
template Polynomial<double> poisson_bracket(const PolyField<double>&, const Polynomial<double>&, const Polynomial<double>&);
template Polynomial<Rational> poisson_bracket(const PolyField<Rational>&, const Polynomial<Rational>&,
                                              const Polynomial<Rational>&);

}  // namespace pb::poly
