#include "physbench/laxflow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace pb::laxflow {

Twist::Twist(RMatrix c) : c_(std::move(c)) {
  if (c_.rows() != c_.cols()) throw ShapeError("twist conjugator must be square");
  Eigen::FullPivLU<RMatrix> lu(c_);
  if (!lu.isInvertible()) throw SingularError("twist conjugator is singular");
  c_inv_ = lu.inverse();
}

Twist Twist::identity(Eigen::Index n) { return Twist(RMatrix::Identity(n, n)); }

Twist Twist::diagonal(const RVector& d) { return Twist(d.asDiagonal().toDenseMatrix()); }

Twist Twist::permutation(const std::vector<int>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(perm.size());
  std::iota(expect.begin(), expect.end(), 0);
  if (sorted != expect) throw DomainError("not a permutation");
  RMatrix c = RMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) c(perm[static_cast<std::size_t>(k)], k) = 1.0;
  return Twist(c);
}

bool Twist::preserves_splitting() const {
  const Eigen::Index n = size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      RMatrix e = RMatrix::Zero(n, n);
      e(i, j) = 1.0;
      const RMatrix img = apply(e);
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          if (std::abs(img(a, b)) < 1e-14) continue;
          if ((i < j && a >= b) || (i > j && a <= b) || (i == j && a != b)) return false;
        }
      }
    }
  }
  return true;
}

PowerTrace::PowerTrace(int k) : k_(k) {
  if (k < 1) throw DomainError("power must be at least 1");
}

RMatrix PowerTrace::gradient(const RMatrix& l, const Twist& phi) const {
  if (l.rows() != phi.size()) throw ShapeError("twist size does not match L");
  Eigen::FullPivLU<RMatrix> lu(l);
  if (!lu.isInvertible()) throw SingularError("L must be invertible");
  const RMatrix base = phi.conjugator().fullPivLu().solve(l);
  RMatrix out = base;
  for (int p = 1; p < k_; ++p) out = out * base;
  return out;
}

double PowerTrace::value(const RMatrix& l, const Twist& phi) const {
  const RMatrix base = phi.conjugator().fullPivLu().solve(l);
  RMatrix pw = base;
  for (int p = 1; p < k_; ++p) pw = pw * base;
  return pw.trace() / k_;
}

RMatrix project_plus(const RMatrix& x) {
  RMatrix out = x.triangularView<Eigen::StrictlyUpper>();
  out.diagonal() = 0.5 * x.diagonal();
  return out;
}

RMatrix project_minus(const RMatrix& x) {
  RMatrix out = x.triangularView<Eigen::StrictlyLower>();
  out.diagonal() = 0.5 * x.diagonal();
  return out;
}

FactorizationResult factorize(const RMatrix& g) {
  if (g.rows() != g.cols()) throw ShapeError("factorization needs a square matrix");
  const Eigen::Index n = g.rows();
  const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
  // Doolittle without pivoting: g = lower * diag(d) * upper with unit diagonals.
  RMatrix work = g;
  RMatrix lower = RMatrix::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double pivot = work(k, k);
    if (std::abs(pivot) < 1e-12 * scale) throw DomainError("leading principal minor vanishes; outside the factorization domain");
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double f = work(i, k) / pivot;
      lower(i, k) = f;
      work.row(i) -= f * work.row(k);
    }
  }
  const RVector d = work.diagonal();
  if ((d.array() <= 0.0).any()) throw DomainError("factorization requires positive pivots for the square-root split");
  RMatrix upper = work;
  for (Eigen::Index k = 0; k < n; ++k) upper.row(k) /= d(k);
  upper = upper.triangularView<Eigen::Upper>();
  const RVector root = d.cwiseSqrt();

  FactorizationResult r;
  r.g_plus = root.asDiagonal() * upper;
  const RMatrix g_minus_inv = lower * root.asDiagonal();
  r.g_minus = g_minus_inv.triangularView<Eigen::Lower>().solve(RMatrix::Identity(n, n));
  r.g_minus = r.g_minus.triangularView<Eigen::Lower>();
  r.residual = (g_minus_inv * r.g_plus - g).cwiseAbs().maxCoeff();
  return r;
}

LaxSystem make_system(RMatrix l0, int power, Twist twist) {
  if (l0.rows() != l0.cols() || l0.rows() != twist.size()) throw ShapeError("L0 and twist sizes must agree");
  if (!Eigen::FullPivLU<RMatrix>(l0).isInvertible()) throw SingularError("L0 must be invertible");
  return {std::move(l0), PowerTrace(power), std::move(twist)};
}

FlowPoint flow_point(const LaxSystem& sys, double t) {
  const RMatrix x = sys.hamiltonian.gradient(sys.l0, sys.twist);
  const RMatrix g = (t * x).exp();
  FactorizationResult f;
  try {
    f = factorize(g);
  } catch (const DomainError& e) {
    std::ostringstream msg;
    msg << "factorization failed at t = " << t << ": " << e.what();
    throw DomainError(msg.str());
  }
  FlowPoint p;
  p.from_plus = sys.twist.apply(f.g_plus) * sys.l0 * f.g_plus.inverse();
  p.from_minus = sys.twist.apply(f.g_minus) * sys.l0 * f.g_minus.inverse();
  return p;
}

LaxTrajectory lax_solve_by_factorization(const LaxSystem& sys, const std::vector<double>& times) {
  LaxTrajectory tr;
  for (double t : times) {
    const FlowPoint p = flow_point(sys, t);
    tr.times.push_back(t);
    tr.branch_gap = std::max(tr.branch_gap, (p.from_plus - p.from_minus).cwiseAbs().maxCoeff());
    tr.states.push_back(p.from_plus);
  }
  return tr;
}

namespace {

RMatrix rhs(const LaxSystem& sys, const RMatrix& l) {
  const RMatrix m = project_plus(sys.hamiltonian.gradient(l, sys.twist));
  return sys.twist.apply(m) * l - l * m;
}

RMatrix integrate(const LaxSystem& sys, double t_end, long steps) {
  RMatrix l = sys.l0;
  const double h = t_end / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    const RMatrix k1 = rhs(sys, l);
    const RMatrix k2 = rhs(sys, l + 0.5 * h * k1);
    const RMatrix k3 = rhs(sys, l + 0.5 * h * k2);
    const RMatrix k4 = rhs(sys, l + h * k3);
    l += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return l;
}

}  // namespace

RMatrix lax_ode_reference(const LaxSystem& sys, double t_end, const OdeOptions& opt) {
  if (t_end == 0.0) return sys.l0;
  long steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t_end) / opt.initial_step)));
  RMatrix prev = integrate(sys, t_end, steps);
  for (int k = 0; k < opt.max_halvings; ++k) {
    steps *= 2;
    RMatrix next = integrate(sys, t_end, steps);
    if ((next - prev).cwiseAbs().maxCoeff() < opt.agreement) return next;
    prev = std::move(next);
  }
  throw ConvergenceError("RK4 step control did not reach the requested agreement");
}

RVector sorted_real_spectrum(const RMatrix& l) {
  Eigen::EigenSolver<RMatrix> es(l, false);
  RVector re = es.eigenvalues().real();
  std::sort(re.data(), re.data() + re.size());
  return re;
}

double spectrum_distance(const RMatrix& a, const RMatrix& b) {
  auto sorted = [](const RMatrix& m) {
    Eigen::EigenSolver<RMatrix> es(m, false);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
      return std::abs(x.real() - y.real()) > 1e-9 ? x.real() < y.real() : x.imag() < y.imag();
    });
    return ev;
  };
  const auto ea = sorted(a);
  const auto eb = sorted(b);
  if (ea.size() != eb.size()) throw ShapeError("matrices differ in size");
  double d = 0.0;
  for (std::size_t k = 0; k < ea.size(); ++k) d = std::max(d, std::abs(ea[k] - eb[k]));
  return d;
}

}  // namespace pb::laxflow
