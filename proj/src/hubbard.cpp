#include "physbench/hubbard.hpp"

#include <algorithm>
#include <cmath>

#include "physbench/spinalg.hpp"

namespace pb::hubbard {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

CMatrix lowering() {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 1) = 1.0;
  return c;
}

CMatrix parity() {
  CMatrix p = CMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  p(1, 1) = -1.0;
  return p;
}

CMatrix local_annihilator(Spin s) {
  const CMatrix id = CMatrix::Identity(2, 2);
  return s == Spin::up ? kron(lowering(), id) : kron(parity(), lowering());
}

double max_abs(const SparseOperator& op) { return op.max_abs_entry(); }

}  // namespace

FermiSpace::FermiSpace(std::size_t n_sites, SiteSigns signs)
    : n_(n_sites), signs_(signs), space_(std::vector<int>(n_sites, 4)) {
  if (n_sites == 0) throw DomainError("fermion space needs at least one site");
  if (n_sites > 6) throw DomainError("fermion space limited to 6 sites");
  const CMatrix site_parity = kron(parity(), parity());
  for (std::size_t i = 0; i < n_; ++i) {
    for (Spin s : {Spin::up, Spin::down}) {
      SparseOperator op = spinalg::embed(local_annihilator(s), i, space_);
      if (signs_ == SiteSigns::jordan_wigner) {
        for (std::size_t k = 0; k < i; ++k) op = spinalg::embed(site_parity, k, space_) * op;
      }
      annihilators_.push_back(op);
    }
  }
}

SparseOperator FermiSpace::annihilate(std::size_t site, Spin s) const {
  if (site >= n_) throw ShapeError("site index out of range");
  return annihilators_[2 * site + static_cast<std::size_t>(s)];
}

SparseOperator FermiSpace::create(std::size_t site, Spin s) const { return annihilate(site, s).adjoint(); }

SparseOperator FermiSpace::number(std::size_t site, Spin s) const {
  return (create(site, s) * annihilate(site, s)).with_checked_hermitian_flag();
}

std::vector<Bond> chain_bonds(std::size_t n, bool periodic) {
  std::vector<Bond> out;
  for (std::size_t i = 0; i + 1 < n; ++i) out.push_back({i, i + 1});
  if (periodic && n > 2) out.push_back({n - 1, 0});
  return out;
}

SparseOperator standard_hubbard(const HubbardParams& p, const FermiSpace& fs, bool periodic) {
  SparseOperator h = SparseOperator::zero(fs.space());
  for (std::size_t i = 0; i < fs.n_sites(); ++i) {
    const auto nu = fs.number(i, Spin::up);
    const auto nd = fs.number(i, Spin::down);
    h = h + p.u * (nu * nd) - p.mu * (nu + nd);
  }
  for (const auto& b : chain_bonds(fs.n_sites(), periodic)) {
    for (Spin s : {Spin::up, Spin::down}) {
      h = h + p.t * (fs.create(b.j, s) * fs.annihilate(b.i, s) + fs.create(b.i, s) * fs.annihilate(b.j, s));
    }
  }
  return h.with_checked_hermitian_flag(1e-12);
}

std::map<std::string, const SparseOperator*> Generators::named() const {
  return {{"spin_plus", &spin.plus}, {"spin_minus", &spin.minus}, {"spin_h", &spin.h},
          {"pseudo_plus", &pseudo.plus}, {"pseudo_minus", &pseudo.minus}, {"pseudo_h", &pseudo.h}};
}

Generators symmetry_generators(const FermiSpace& fs) {
  const auto zero = SparseOperator::zero(fs.space());
  Generators g{{zero, zero, zero}, {zero, zero, zero}};
  for (std::size_t i = 0; i < fs.n_sites(); ++i) {
    const auto up = fs.annihilate(i, Spin::up);
    const auto dn = fs.annihilate(i, Spin::down);
    const auto nu = fs.number(i, Spin::up);
    const auto nd = fs.number(i, Spin::down);
    g.spin.plus = g.spin.plus + up.adjoint() * dn;
    g.spin.minus = g.spin.minus + dn.adjoint() * up;
    g.spin.h = g.spin.h + nu - nd;
    g.pseudo.plus = g.pseudo.plus + up.adjoint() * dn.adjoint();
    g.pseudo.minus = g.pseudo.minus + dn * up;
    g.pseudo.h = g.pseudo.h + nu + nd - fs.identity();
  }
  return g;
}

std::map<std::string, double> commutation_report(const SparseOperator& h, const Generators& g) {
  std::map<std::string, double> out;
  for (const auto& [name, op] : g.named()) out[name] = max_abs(commutator(h, *op));
  return out;
}

double max_commutator(const std::map<std::string, double>& report) {
  double m = 0.0;
  for (const auto& [name, v] : report) m = std::max(m, v);
  return m;
}

double su2_residual(const Triple& t) {
  const double a = max_abs(commutator(t.plus, t.minus) - t.h);
  const double b = max_abs(commutator(t.h, t.plus) - 2.0 * t.plus);
  const double c = max_abs(commutator(t.h, t.minus) + 2.0 * t.minus);
  return std::max({a, b, c});
}

double symmetric_v(const HsymParams& p, double e) {
  if (e < 1.0) throw DomainError("edges per site must be at least 1");
  return p.r + p.s + (p.u - 2.0 * p.mu) / e;
}

SparseOperator hsym_hamiltonian(const HsymParams& p, const FermiSpace& fs, bool periodic) {
  const std::size_t n = fs.n_sites();
  const auto bonds = chain_bonds(n, periodic);
  std::vector<double> degree(n, 0.0);
  for (const auto& b : bonds) {
    degree[b.i] += 1.0;
    degree[b.j] += 1.0;
  }
  if (p.e && *p.e < 1.0) throw DomainError("edges per site must be at least 1");

  const auto id = fs.identity();
  const Spin spins[2] = {Spin::up, Spin::down};
  auto other = [](Spin s) { return s == Spin::up ? Spin::down : Spin::up; };

  SparseOperator h = SparseOperator::zero(fs.space());
  for (std::size_t i = 0; i < n; ++i) {
    const auto nu = fs.number(i, Spin::up);
    const auto nd = fs.number(i, Spin::down);
    h = h + p.u * (nu * nd) - p.mu * (nu + nd);
  }
  for (const auto& b : bonds) {
    const std::size_t i = b.i, j = b.j;
    const double e = p.e ? *p.e : 2.0 / (1.0 / degree[i] + 1.0 / degree[j]);
    const auto pair_i = fs.create(i, Spin::up) * fs.create(i, Spin::down);
    const auto pair_j = fs.annihilate(j, Spin::down) * fs.annihilate(j, Spin::up);
    const auto double_i = fs.number(i, Spin::up) * fs.number(i, Spin::down);
    const auto double_j = fs.number(j, Spin::up) * fs.number(j, Spin::down);

    // Terms that receive an explicit hermitian conjugate.
    SparseOperator k = ((2.0 * p.mu - p.u) / e) * (pair_i * pair_j);
    for (Spin s : spins) {
      const Spin o = other(s);
      const auto nis = fs.number(i, s);
      const auto njs = fs.number(j, s);
      k = k + p.t * (fs.create(i, s) * fs.annihilate(j, s));
      k = k + (fs.create(i, o) * fs.annihilate(j, o)) * (p.z * ((nis - id) * njs) + std::conj(p.z) * (nis * (njs - id)));

      h = h + p.r * (nis * fs.number(j, o)) + p.s * (nis * njs);
      h = h + (p.s - p.r) * (fs.create(i, s) * fs.annihilate(i, o) * fs.create(j, o) * fs.annihilate(j, s));
      h = h + p.v * (double_i * double_j - double_i * njs - nis * double_j);
    }
    h = h + k + k.adjoint();
  }
  return h.with_checked_hermitian_flag(1e-12);
}

TwistReport twist_operator_check(double q) {
  if (!(q > 0.0)) throw DomainError("deformation parameter must be positive");
  const FermiSpace one(1);
  const CMatrix xp = symmetry_generators(one).pseudo.plus.to_dense();
  const CMatrix xm = symmetry_generators(one).pseudo.minus.to_dense();
  const CMatrix hs = symmetry_generators(one).pseudo.h.to_dense();
  const CMatrix id4 = CMatrix::Identity(4, 4);
  const CMatrix id16 = CMatrix::Identity(16, 16);

  const CMatrix f = kron(xm, xp) - kron(xp, xm);
  const CMatrix xi = -(f * f);

  TwistReport r;
  r.q = q;
  r.alpha = 0.5 * (std::sqrt(q) + 1.0 / std::sqrt(q));
  r.beta = -0.5 * (std::sqrt(q) - 1.0 / std::sqrt(q));

  auto qpow = [&](double power) {
    CMatrix d = CMatrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) d(k, k) = std::pow(q, power * hs(k, k).real());
    return d;
  };
  auto coproduct_residuals = [&](double beta, double& rp, double& rm, double& rh) {
    const CMatrix m = id16 + (r.alpha - 1.0) * xi + beta * f;
    const CMatrix ms = m.transpose();
    auto res = [&](const CMatrix& x) {
      const CMatrix dc = kron(x, id4) + kron(id4, x);
      const CMatrix dq = kron(x, qpow(-0.5)) + kron(qpow(0.5), x);
      return (m * dc * ms - dq).cwiseAbs().maxCoeff();
    };
    rp = res(xp);
    rm = res(xm);
    const CMatrix dh = kron(hs, id4) + kron(id4, hs);
    rh = (m * dh * ms - dh).cwiseAbs().maxCoeff();
    return m;
  };
  const CMatrix m = coproduct_residuals(r.beta, r.coproduct_plus, r.coproduct_minus, r.coproduct_h);
  double lp = 0.0, lm = 0.0, lh = 0.0;
  (void)coproduct_residuals(-r.beta, lp, lm, lh);
  r.coproduct_literal_sign = std::max({lp, lm, lh});

  const CMatrix mms = m * m.transpose();
  r.mm_star_printed = (mms - (id16 + (r.alpha * r.alpha - 1.0) * xi)).cwiseAbs().maxCoeff();
  r.mm_star_actual = (mms - (id16 + (r.alpha * r.alpha + r.beta * r.beta - 1.0) * xi)).cwiseAbs().maxCoeff();
  r.xi_projector = (xi * xi - xi).cwiseAbs().maxCoeff();
  r.xi_closed_form = (xi - 0.5 * (kron(hs * hs, hs * hs) - kron(hs, hs))).cwiseAbs().maxCoeff();
  return r;
}

SparseOperator particle_hole_down(const FermiSpace& fs) {
  CMatrix flip = CMatrix::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  const CMatrix local = kron(CMatrix::Identity(2, 2), flip);
  SparseOperator w = fs.identity();
  for (std::size_t i = 0; i < fs.n_sites(); ++i) w = w * spinalg::embed(local, i, fs.space());
  return w.with_checked_hermitian_flag();
}

}  // namespace pb::hubbard
