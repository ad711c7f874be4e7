#include "physbench/swmap.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <cmath>
#include <limits>

namespace pb::swmap {

namespace {

using Span = std::span<const double>;

Span as_span(const RVector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double max_abs(const RMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_numeric(const RField& field, std::size_t dim, const char* what) {
  if (field.dim() != dim) throw ShapeError(std::string(what) + " has the wrong dimension");
  if (field.n_vars() != dim) throw ShapeError(std::string(what) + " must depend on the coordinates only");
}

RMatrix theta_t_at(const RMatrix& th, const RMatrix& f, double t) {
  const auto n = th.rows();
  const RMatrix m = RMatrix::Identity(n, n) + t * f * th;
  Eigen::FullPivLU<RMatrix> lu(m);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-14) throw SingularError("1 + t f theta is singular");
  return th * lu.inverse();
}

using PolyMatrix = std::vector<std::vector<RPoly>>;

PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b, std::size_t n_vars) {
  const std::size_t n = a.size();
  PolyMatrix out(n, std::vector<RPoly>(n, RPoly(n_vars)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!b[k][j].is_zero()) out[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return out;
}

PolyMatrix to_matrix(const RField& f) {
  const std::size_t n = f.dim();
  PolyMatrix out(n, std::vector<RPoly>(n, RPoly(f.n_vars())));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i][j] = f.at(i, j);
  }
  return out;
}

Rational factorial(int n) {
  Rational r(1);
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace

RMatrix theta_t(const DField& theta, const DField& f, double t, Span x) {
  return theta_t_at(theta.evaluate_matrix(x), f.evaluate_matrix(x), t);
}

RMatrix theta_t_ode(const DField& theta, const DField& f, double t, Span x, int steps) {
  if (steps < 1) throw DomainError("step count must be positive");
  const RMatrix fx = f.evaluate_matrix(x);
  RMatrix th = theta.evaluate_matrix(x);
  const double h = t / steps;
  auto rhs = [&](const RMatrix& m) -> RMatrix { return -m * fx * m; };
  for (int s = 0; s < steps; ++s) {
    const RMatrix k1 = rhs(th);
    const RMatrix k2 = rhs(th + 0.5 * h * k1);
    const RMatrix k3 = rhs(th + 0.5 * h * k2);
    const RMatrix k4 = rhs(th + h * k3);
    th += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return th;
}

double schouten_residual(const BivectorFn& theta, Span x, double step) {
  const std::size_t d = x.size();
  std::vector<double> p(x.begin(), x.end());
  std::vector<RMatrix> grad(d);
  for (std::size_t l = 0; l < d; ++l) {
    auto at = [&](double shift) {
      p[l] = x[l] + shift;
      RMatrix v = theta(p);
      p[l] = x[l];
      return v;
    };
    grad[l] = (-at(2 * step) + 8.0 * at(step) - 8.0 * at(-step) + at(-2 * step)) / (12.0 * step);
  }
  const RMatrix th = theta(x);
  double worst = 0.0;
  const auto n = static_cast<Eigen::Index>(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        double s = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
          const auto& g = grad[static_cast<std::size_t>(l)];
          s += th(i, l) * g(j, k) + th(j, l) * g(k, i) + th(k, l) * g(i, j);
        }
        worst = std::max(worst, std::abs(s));
      }
    }
  }
  return worst;
}

// ---- flow ----

MoserFlow::MoserFlow(const RField& theta, const RField& a, FlowOptions opt) : dim_(theta.dim()), opt_(opt) {
  if (!theta.antisymmetric()) throw DomainError("theta must be an antisymmetric bivector field");
  require_numeric(theta, dim_, "theta");
  require_numeric(a, dim_, "a");
  if (a.rank() != 1 || a.shape()[0] != dim_) throw ShapeError("a must be a covector field");
  if (opt_.base_steps < 1 || opt_.max_halvings < 0) throw DomainError("invalid flow step options");
  theta_ = theta.to_double();
  a_ = a.to_double();
  f_ = poly::field_strength(a).to_double();
}

RVector MoserFlow::velocity(double t, const RVector& x) const {
  const Span p = as_span(x);
  const RMatrix th = theta_t_at(theta_.evaluate_matrix(p), f_.evaluate_matrix(p), t);
  return th * a_.evaluate_vector(p);
}

FlowResult MoserFlow::integrate(const RVector& x, double t0, double t1, int steps, const DPoly* tracked) const {
  if (steps < 1) throw DomainError("step count must be positive");
  if (static_cast<std::size_t>(x.size()) != dim_) throw ShapeError("point has the wrong dimension");
  const double h = (t1 - t0) / steps;
  auto track = [&](const RVector& p) { return tracked ? tracked->evaluate(as_span(p)) : 0.0; };
  FlowResult r;
  r.point = x;
  r.steps = steps;
  double t = t0;
  try {
    for (int s = 0; s < steps; ++s) {
      const RVector& y = r.point;
      const RVector k1 = velocity(t, y);
      const RVector y2 = y + 0.5 * h * k1;
      const RVector k2 = velocity(t + 0.5 * h, y2);
      const RVector y3 = y + 0.5 * h * k2;
      const RVector k3 = velocity(t + 0.5 * h, y3);
      const RVector y4 = y + h * k3;
      const RVector k4 = velocity(t + h, y4);
      r.integral += (h / 6.0) * (track(y) + 2.0 * track(y2) + 2.0 * track(y3) + track(y4));
      r.point = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = t0 + (s + 1) * h;
      if (!r.point.allFinite()) throw DomainError("flow left every bounded region");
    }
  } catch (const SingularError&) {
    throw DomainError("flow breaks down before the end time: 1 + t f theta became singular");
  }
  return r;
}

FlowResult MoserFlow::solve(const RVector& x, double t0, double t1, const DPoly* tracked) const {
  int steps = opt_.base_steps;
  FlowResult prev = integrate(x, t0, t1, steps, tracked);
  for (int k = 0; k <= opt_.max_halvings; ++k) {
    steps *= 2;
    FlowResult next = integrate(x, t0, t1, steps, tracked);
    const double gap = std::max((next.point - prev.point).cwiseAbs().maxCoeff(), std::abs(next.integral - prev.integral));
    if (gap < opt_.agreement) return next;
    prev = std::move(next);
  }
  throw ConvergenceError("flow step control did not reach the requested agreement");
}

RMatrix MoserFlow::jacobian(const RVector& x, int steps) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  const double h = opt_.jacobian_step;
  RMatrix j(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    RVector plus = x, minus = x;
    plus(k) += h;
    minus(k) -= h;
    j.col(k) = (integrate(plus, 0.0, 1.0, steps).point - integrate(minus, 0.0, 1.0, steps).point) / (2.0 * h);
  }
  return j;
}

RVector moser_flow(const RField& theta, const RField& a, const RVector& x, double t_end) {
  return MoserFlow(theta, a).solve(x, 0.0, t_end).point;
}

double pushforward_residual(const RField& theta, const RField& a, const std::vector<RVector>& samples,
                            const FlowOptions& opt) {
  const MoserFlow flow(theta, a, opt);
  double worst = 0.0;
  for (const RVector& x : samples) {
    const FlowResult img = flow.solve(x);
    const RMatrix j = flow.jacobian(x, img.steps);
    const RMatrix lhs = j * flow.theta().evaluate_matrix(as_span(x)) * j.transpose();
    const RMatrix rhs = theta_t(flow.theta(), flow.field_strength(), 1.0, as_span(img.point));
    worst = std::max(worst, max_abs(lhs - rhs));
  }
  return worst;
}

// ---- gauge parameter ----

RPoly lambda_tilde(const RField& theta, const RField& a, const RPoly& lambda, int order) {
  if (order < 0 || order > 4) throw DomainError("truncation order must lie in 0..4");
  const std::size_t d = theta.dim();
  const std::size_t nv = lambda.n_vars();
  if (theta.n_vars() != nv || a.n_vars() != nv) throw ShapeError("theta, a and lambda must share their variables");
  if (a.dim() != d || a.rank() != 1 || a.shape()[0] != d) throw ShapeError("a must be a covector field");
  if (order == 0) return lambda;

  const std::size_t t_var = nv;
  const std::size_t n = nv + 1;
  const RField th = theta.with_vars(n);
  const RField av = a.with_vars(n);
  const PolyMatrix th_m = to_matrix(th);
  const PolyMatrix f_th = multiply(to_matrix(poly::field_strength(av)), th_m, n);
  const RPoly minus_t = -RPoly::variable(n, t_var);

  // theta_t = sum_k (-t)^k theta (f theta)^k, kept to t^order.
  PolyMatrix theta_t_m = th_m;
  PolyMatrix term = th_m;
  for (int k = 1; k <= order; ++k) {
    term = multiply(term, f_th, n);
    for (auto& row : term) {
      for (auto& p : row) p = (p * minus_t).truncated(t_var, order);
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) theta_t_m[i][j] += term[i][j];
    }
  }
  std::vector<RPoly> field(d, RPoly(n));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) field[j] += theta_t_m[j][i] * av.at(i);
  }

  RPoly g = lambda.with_vars(n);
  RPoly out = g.coefficient(t_var, 0);
  for (int step = 1; step <= order; ++step) {
    RPoly next = g.derivative(t_var);
    for (std::size_t j = 0; j < d; ++j) {
      const RPoly dg = g.derivative(j);
      if (!dg.is_zero()) next += field[j] * dg;
    }
    g = next.truncated(t_var, order - step);
    out += Rational(Rational(1) / factorial(step + 1)) * g.coefficient(t_var, 0);
  }
  return out.with_vars(nv);
}

RPoly lambda_tilde_second_order_closed_form(const RField& theta, const RField& a, const RPoly& lambda) {
  const std::size_t d = theta.dim();
  const std::size_t nv = lambda.n_vars();
  const RField f = poly::field_strength(a);
  // first = theta^{ij} a_j d_i lambda
  auto contract = [&](const RPoly& u) {
    RPoly s(nv);
    for (std::size_t i = 0; i < d; ++i) {
      const RPoly du = u.derivative(i);
      if (du.is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j) s += theta.at(i, j) * a.at(j) * du;
    }
    return s;
  };
  const RPoly first = contract(lambda);
  RPoly ftf(nv);  // theta^{ij} f_{jk} theta^{kl} a_l d_i lambda
  for (std::size_t i = 0; i < d; ++i) {
    const RPoly dl = lambda.derivative(i);
    if (dl.is_zero()) continue;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        const RPoly fjk = f.at(j, k);
        if (fjk.is_zero()) continue;
        for (std::size_t l = 0; l < d; ++l) ftf += theta.at(i, j) * fjk * theta.at(k, l) * a.at(l) * dl;
      }
    }
  }
  return lambda + Rational(1, 2) * first + Rational(1, 6) * (contract(first) - ftf);
}

double lambda_tilde_exact(const MoserFlow& flow, const RPoly& lambda, const RVector& x, int steps) {
  const DPoly lam = lambda.to_double();
  return flow.integrate(x, 0.0, 1.0, steps, &lam).integral;
}

double gauge_covariance_residual(const RField& theta, const RField& a, const RPoly& lambda, double eps,
                                 const std::vector<RVector>& samples, const FlowOptions& opt) {
  const std::size_t d = theta.dim();
  std::vector<RPoly> dl;
  for (std::size_t i = 0; i < d; ++i) dl.push_back(lambda.derivative(i));
  const RField shifted = a.plus_scaled(Rational(eps), RField::vector(d, dl));
  const MoserFlow base(theta, a, opt);
  const MoserFlow moved(theta, shifted, opt);
  const DPoly lam = lambda.to_double();
  const double h = opt.jacobian_step;

  double worst = 0.0;
  for (const RVector& x : samples) {
    const int steps = std::max(base.solve(x).steps, moved.solve(x).steps);
    const RVector y0 = base.integrate(x, 0.0, 1.0, steps).point;
    const RVector y1 = moved.integrate(x, 0.0, 1.0, steps).point;
    const RMatrix jac = base.jacobian(x, steps);
    RVector grad_lt(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      RVector plus = x, minus = x;
      plus(static_cast<Eigen::Index>(k)) += h;
      minus(static_cast<Eigen::Index>(k)) -= h;
      grad_lt(static_cast<Eigen::Index>(k)) =
          (base.integrate(plus, 0.0, 1.0, steps, &lam).integral - base.integrate(minus, 0.0, 1.0, steps, &lam).integral) /
          (2.0 * h);
    }
    const RMatrix th = base.theta().evaluate_matrix(as_span(x));
    const RVector th_grad = th * grad_lt;

    // Coordinates and pairwise products, with their gradients at the image point.
    auto check = [&](double v0, double v1, const RVector& grad_at_image) {
      const RVector grad_pullback = jac.transpose() * grad_at_image;
      const double bracket = grad_pullback.dot(th_grad);
      worst = std::max(worst, std::abs(v1 - v0 - eps * bracket));
    };
    const auto n = static_cast<Eigen::Index>(d);
    for (Eigen::Index i = 0; i < n; ++i) {
      RVector g = RVector::Zero(n);
      g(i) = 1.0;
      check(y0(i), y1(i), g);
      for (Eigen::Index j = i; j < n; ++j) {
        RVector gq = RVector::Zero(n);
        gq(i) += y0(j);
        gq(j) += y0(i);
        check(y0(i) * y0(j), y1(i) * y1(j), gq);
      }
    }
  }
  return worst;
}

ScalingFit fit_scaling(std::vector<double> eps, std::vector<double> residuals) {
  if (eps.size() != residuals.size() || eps.size() < 2) throw DomainError("scaling fit needs at least two points");
  ScalingFit fit;
  fit.eps = std::move(eps);
  fit.residuals = std::move(residuals);
  if (std::any_of(fit.residuals.begin(), fit.residuals.end(), [](double r) { return r <= 0.0; })) {
    fit.exponent = std::numeric_limits<double>::infinity();
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(fit.eps.size());
  for (std::size_t k = 0; k < fit.eps.size(); ++k) {
    const double lx = std::log(fit.eps[k]);
    const double ly = std::log(fit.residuals[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

ScalingFit gauge_covariance_scaling(const RField& theta, const RField& a, const RPoly& lambda,
                                    const std::vector<RVector>& samples, std::vector<double> eps) {
  std::vector<double> res;
  for (double e : eps) res.push_back(gauge_covariance_residual(theta, a, lambda, e, samples));
  return fit_scaling(std::move(eps), std::move(res));
}

ConsistencyReport semiclassical_consistency(const RField& theta, const RField& a, const RPoly& alpha, const RPoly& beta,
                                            int order, const std::vector<RVector>& samples) {
  const std::size_t d = theta.dim();
  if (alpha.n_vars() != d || beta.n_vars() != d || a.n_vars() != d || theta.n_vars() != d) {
    throw ShapeError("consistency check expects fields on the coordinates only");
  }
  const std::size_t s_var = d;
  const std::size_t scale_var = d + 1;
  const std::size_t n = d + 2;
  const RField th = theta.with_vars(n);
  const RPoly scale = RPoly::variable(n, scale_var);
  const RPoly s = RPoly::variable(n, s_var);

  // a -> scale * a + s * d(gen)
  auto varied = [&](const RPoly& gen) {
    std::vector<RPoly> comps;
    for (std::size_t i = 0; i < d; ++i) comps.push_back(scale * a.at(i).with_vars(n) + s * gen.derivative(i).with_vars(n));
    return RField::vector(d, std::move(comps));
  };
  const RPoly lt_beta = lambda_tilde(th, varied(alpha), beta.with_vars(n), order);
  const RPoly lt_alpha = lambda_tilde(th, varied(beta), alpha.with_vars(n), order);

  ConsistencyReport rep;
  rep.order = order;
  rep.residual = lt_beta.coefficient(s_var, 1) - lt_alpha.coefficient(s_var, 1) +
                 poly::poisson_bracket(th, lt_alpha.coefficient(s_var, 0), lt_beta.coefficient(s_var, 0));
  rep.lowest_field_degree = rep.residual.lowest_degree_in(scale_var);
  std::vector<double> p(n, 0.0);
  p[scale_var] = 1.0;
  for (const RVector& x : samples) {
    if (static_cast<std::size_t>(x.size()) != d) throw ShapeError("sample has the wrong dimension");
    for (std::size_t k = 0; k < d; ++k) p[k] = x(static_cast<Eigen::Index>(k));
    rep.sample_norm = std::max(rep.sample_norm, std::abs(rep.residual.evaluate(p)));
  }
  return rep;
}

// ---- mini map ----

LieAlgebra::LieAlgebra(int n, std::vector<double> c) : n_(n), c_(std::move(c)) {
  if (n < 1) throw DomainError("algebra dimension must be positive");
  if (c_.size() != static_cast<std::size_t>(n * n * n)) throw ShapeError("structure constants need n^3 entries");
}

LieAlgebra LieAlgebra::su2() {
  std::vector<double> c(27, 0.0);
  auto set = [&](int a, int b, int k, double v) { c[static_cast<std::size_t>((a * 3 + b) * 3 + k)] = v; };
  for (auto [a, b, k] : {std::array{0, 1, 2}, std::array{1, 2, 0}, std::array{2, 0, 1}}) {
    set(a, b, k, 1.0);
    set(b, a, k, -1.0);
  }
  return LieAlgebra(3, std::move(c));
}

double LieAlgebra::jacobi_residual() const {
  double worst = 0.0;
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      for (int k = 0; k < n_; ++k) {
        for (int e = 0; e < n_; ++e) {
          double s = 0.0;
          for (int m = 0; m < n_; ++m) s += c(a, b, m) * c(m, k, e) + c(b, k, m) * c(m, a, e) + c(k, a, m) * c(m, b, e);
          worst = std::max(worst, std::abs(s));
        }
      }
    }
  }
  return worst;
}

RVector LieAlgebra::bracket(const RVector& u, const RVector& v) const {
  RVector out = RVector::Zero(n_);
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      for (int k = 0; k < n_; ++k) out(k) += u(a) * v(b) * c(a, b, k);
    }
  }
  return out;
}

namespace {

// sum_n M^n (v0 - n v1) / (n+1)!
RVector matrix_series(const RMatrix& m, const RVector& v0, const RVector& v1) {
  RVector out = RVector::Zero(v0.size());
  RVector w0 = v0, w1 = v1;
  double fact = 1.0;
  const double m_norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  for (int n = 0; n < 400; ++n) {
    fact *= (n + 1);
    const RVector term = (w0 - n * w1) / fact;
    out += term;
    if (n > m_norm + 2 && term.cwiseAbs().maxCoeff() <= 1e-17 * (1.0 + out.cwiseAbs().maxCoeff())) return out;
    w0 = m * w0;
    w1 = m * w1;
  }
  throw ConvergenceError("matrix series did not converge");
}

}  // namespace

MiniMapValue mini_sw_map(const LieAlgebra& lie, const MiniFields& fields, Span x) {
  const int n = lie.size();
  const auto dim = static_cast<Eigen::Index>(fields.dim);
  if (fields.a_ext.rank() != 1 || static_cast<int>(fields.a_ext.shape()[0]) != n) throw ShapeError("a_b needs n components");
  if (fields.lambda.rank() != 1 || static_cast<int>(fields.lambda.shape()[0]) != n) throw ShapeError("lambda_b needs n components");
  if (fields.a_mu.rank() != 2 || fields.a_mu.shape()[0] != fields.dim || static_cast<int>(fields.a_mu.shape()[1]) != n) {
    throw ShapeError("a_mu needs dim x n components");
  }
  const RVector ab = fields.a_ext.evaluate_vector(x);
  RMatrix m = RMatrix::Zero(n, n);  // M_a^b = C^{bc}_a a_c
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int k = 0; k < n; ++k) m(a, b) += lie.c(b, k, a) * ab(k);
    }
  }
  const RMatrix amu = fields.a_mu.evaluate_matrix(x);
  MiniMapValue out;
  out.potential.resize(dim, n);
  for (Eigen::Index mu = 0; mu < dim; ++mu) {
    const RVector dab = fields.a_ext.derivative(static_cast<std::size_t>(mu)).evaluate_vector(x);
    const RVector row = amu.row(mu).transpose();
    out.potential.row(mu) = matrix_series(m, row, dab - row).transpose();
  }
  out.parameter = matrix_series(m, fields.lambda.evaluate_vector(x), RVector::Zero(n));
  return out;
}

MiniFields gauge_shift(const MiniFields& fields, double eps) {
  const std::size_t n = fields.lambda.shape()[0];
  std::vector<DPoly> amu;
  for (std::size_t mu = 0; mu < fields.dim; ++mu) {
    for (std::size_t b = 0; b < n; ++b) amu.push_back(fields.a_mu.at(mu, b) + eps * fields.lambda.at(b).derivative(mu));
  }
  MiniFields out = fields;
  out.a_mu = DField::matrix(fields.dim, fields.dim, n, std::move(amu));
  out.a_ext = fields.a_ext.plus_scaled(eps, fields.lambda);
  return out;
}

double mini_gauge_residual(const LieAlgebra& lie, const MiniFields& fields, double eps, Span x) {
  const MiniMapValue base = mini_sw_map(lie, fields, x);
  const MiniMapValue moved = mini_sw_map(lie, gauge_shift(fields, eps), x);
  const double h = 1e-4;
  std::vector<double> p(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t mu = 0; mu < fields.dim; ++mu) {
    p[mu] = x[mu] + h;
    const RVector up = mini_sw_map(lie, fields, p).parameter;
    p[mu] = x[mu] - h;
    const RVector down = mini_sw_map(lie, fields, p).parameter;
    p[mu] = x[mu];
    const RVector d_lambda = (up - down) / (2.0 * h);
    const auto row = static_cast<Eigen::Index>(mu);
    const RVector a_row = base.potential.row(row).transpose();
    const RVector expect = d_lambda + lie.bracket(a_row, base.parameter);
    const RVector diff = moved.potential.row(row).transpose() - a_row - eps * expect;
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return worst;
}

ScalingFit mini_gauge_scaling(const LieAlgebra& lie, const MiniFields& fields, const std::vector<RVector>& samples,
                              std::vector<double> eps) {
  std::vector<double> res;
  for (double e : eps) {
    double worst = 0.0;
    for (const RVector& x : samples) worst = std::max(worst, mini_gauge_residual(lie, fields, e, as_span(x)));
    res.push_back(worst);
  }
  return fit_scaling(std::move(eps), std::move(res));
}

MiniFields random_linear_mini_fields(std::size_t dim, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto linear = [&](double scale) {
    DPoly p = DPoly::constant(dim, scale * normal(rng));
    for (std::size_t k = 0; k < dim; ++k) p += (scale * normal(rng)) * DPoly::variable(dim, k);
    return p;
  };
  const auto nn = static_cast<std::size_t>(n);
  std::vector<DPoly> amu, ab, lam;
  for (std::size_t k = 0; k < dim * nn; ++k) amu.push_back(linear(0.5));
  for (std::size_t k = 0; k < nn; ++k) ab.push_back(linear(0.5));
  for (std::size_t k = 0; k < nn; ++k) lam.push_back(linear(1.0));
  MiniFields f;
  f.dim = dim;
  f.a_mu = DField::matrix(dim, dim, nn, std::move(amu));
  f.a_ext = DField::vector(dim, std::move(ab));
  f.lambda = DField::vector(dim, std::move(lam));
  return f;
}

// ---- star product ----

RPoly moyal_star(const RPoly& f, const RPoly& g, const RField& theta, int order) {
  const std::size_t d = theta.dim();
  if (!theta.antisymmetric() || !theta.is_constant()) throw DomainError("the Moyal product needs a constant bivector");
  if (f.n_vars() != d + 1 || g.n_vars() != d + 1) throw ShapeError("star factors need the coordinates plus the deformation variable");
  if (order < 0) throw DomainError("truncation order must be non-negative");

  // Work on (x, y, kappa) with f(x) g(y); apply sum theta^{ij} d_{x_i} d_{y_j} repeatedly, then set y = x.
  const std::size_t n2 = 2 * d + 1;
  const std::size_t kappa = 2 * d;
  auto lift = [&](const RPoly& p, std::size_t offset) {
    RPoly out(n2);
    for (const auto& [e, c] : p.terms()) {
      poly::Exponents le(n2, 0);
      for (std::size_t k = 0; k < d; ++k) le[offset + k] = e[k];
      le[kappa] = e[d];
      out.add_term(le, c);
    }
    return out;
  };
  std::vector<std::vector<Rational>> th(d, std::vector<Rational>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const RPoly e = theta.at(i, j);
      th[i][j] = e.is_zero() ? Rational(0) : e.terms().begin()->second;
    }
  }
  RPoly term = lift(f, 0) * lift(g, d);
  RPoly sum = term;
  const RPoly half_kappa = Rational(1, 2) * RPoly::variable(n2, kappa);
  for (int m = 1; m <= order && !term.is_zero(); ++m) {
    RPoly next(n2);
    for (std::size_t i = 0; i < d; ++i) {
      const RPoly di = term.derivative(i);
      if (di.is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j) {
        if (th[i][j] == 0) continue;
        next += th[i][j] * di.derivative(d + j);
      }
    }
    term = (Rational(1, m) * next) * half_kappa;
    sum += term;
  }
  RPoly out(d + 1);
  for (const auto& [e, c] : sum.terms()) {
    poly::Exponents ce(d + 1, 0);
    for (std::size_t k = 0; k < d; ++k) ce[k] = e[k] + e[d + k];
    ce[d] = e[kappa];
    out.add_term(ce, c);
  }
  return out;
}

// ---- DBI ----

namespace {

void require_antisymmetric(const RMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw ShapeError(std::string(what) + " must be square");
  if (max_abs(m + m.transpose()) > 1e-12 * (1.0 + max_abs(m))) throw DomainError(std::string(what) + " must be antisymmetric");
}

double positive_det(const RMatrix& m, const char* what) {
  const double det = m.determinant();
  if (!(det > 0.0)) throw DomainError(std::string("determinant of ") + what + " is not positive");
  return det;
}

}  // namespace

DbiReport dbi_identity(const RMatrix& g, const RMatrix& b, const RMatrix& f, const RMatrix& theta) {
  const auto n = g.rows();
  if (g.cols() != n || b.rows() != n || f.rows() != n || theta.rows() != n) throw ShapeError("matrices must share one size");
  if (max_abs(g - g.transpose()) > 1e-12 * (1.0 + max_abs(g))) throw DomainError("g must be symmetric");
  if (Eigen::LLT<RMatrix>(g).info() != Eigen::Success) throw DomainError("g must be positive definite");
  require_antisymmetric(b, "B");
  require_antisymmetric(f, "F");
  require_antisymmetric(theta, "theta");

  const RMatrix id = RMatrix::Identity(n, n);
  const RMatrix gb = g + b;
  const RMatrix closed_twist = id - gb * theta;
  Eigen::FullPivLU<RMatrix> lu_closed(closed_twist);
  if (!lu_closed.isInvertible()) throw SingularError("1 - (g + B) theta is singular");
  const RMatrix open = lu_closed.solve(gb);

  const RMatrix open_twist = id + f * theta;
  Eigen::FullPivLU<RMatrix> lu_open(open_twist);
  if (!lu_open.isInvertible()) throw SingularError("1 + F theta is singular");
  const RMatrix f_prime = lu_open.solve(f);

  DbiReport r;
  r.open_metric = 0.5 * (open + open.transpose());
  r.open_b = 0.5 * (open - open.transpose());
  r.coupling_ratio = 1.0 / std::sqrt(positive_det(closed_twist, "1 - (g + B) theta"));
  r.lhs = std::sqrt(positive_det(gb + f, "g + B + F"));
  // det(theta / theta') = det(1 + F theta)
  r.rhs = std::sqrt(positive_det(open_twist, "1 + F theta")) * std::sqrt(positive_det(open + f_prime, "G + Phi + F'")) /
          r.coupling_ratio;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

DbiInstance random_dbi_instance(int dim, std::mt19937_64& rng) {
  if (dim < 2) throw DomainError("dimension must be at least 2");
  std::normal_distribution<double> normal(0.0, 1.0);
  auto antisym = [&](double scale) {
    RMatrix m = RMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        m(i, j) = scale * normal(rng);
        m(j, i) = -m(i, j);
      }
    }
    return m;
  };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    RMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
    }
    DbiInstance inst{a * a.transpose() / dim + RMatrix::Identity(dim, dim), antisym(0.5), antisym(0.5), antisym(0.3)};
    try {
      const DbiReport r = dbi_identity(inst.g, inst.b, inst.f, inst.theta);
      const RMatrix id = RMatrix::Identity(dim, dim);
      if ((id - (inst.g + inst.b) * inst.theta).determinant() > 1e-3 && (id + inst.f * inst.theta).determinant() > 1e-3 &&
          std::isfinite(r.rhs)) {
        return inst;
      }
    } catch (const std::exception&) {
      // inadmissible draw; try again
    }
  }
  throw ConvergenceError("no admissible random draw found");
}

}  // namespace pb::swmap
