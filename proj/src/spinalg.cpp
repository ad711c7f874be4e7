#include "physbench/spinalg.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

namespace pb::spinalg {

SpinMatrices spin_matrices(SpinSite site) {
  const int d = site.dim();
  const double s = site.spin();
  SpinMatrices out{CMatrix::Zero(d, d), CMatrix::Zero(d, d), CMatrix::Zero(d, d), CMatrix::Zero(d, d),
                   CMatrix::Zero(d, d)};
  for (int k = 0; k < d; ++k) {
    const double m = s - k;
    out.z(k, k) = m;
    if (k > 0) {
      // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
      out.plus(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
  }
  out.minus = out.plus.adjoint();
  out.x = 0.5 * (out.plus + out.minus);
  out.y = cplx(0.0, -0.5) * (out.plus - out.minus);
  return out;
}

SpinMatrices spin_matrices(double s) { return spin_matrices(SpinSite::from_spin(s)); }

namespace {

void append_site_entries(const CMatrix& op, cplx factor, std::size_t site, const HilbertSpace& space,
                         std::vector<Entry>& out) {
  const int d = space.local_dim(site);
  const std::int64_t stride = space.stride(site);
  const std::int64_t dim = space.dim();
  for (std::int64_t col = 0; col < dim; ++col) {
    const int a = space.digit(col, site);
    const std::int64_t base = col - a * stride;
    for (int b = 0; b < d; ++b) {
      const cplx v = op(b, a);
      if (v != cplx(0.0)) out.push_back({base + b * stride, col, factor * v});
    }
  }
}

// Entries of factor * (op on sites i and j), op acting on the d_i * d_j pair
// space with site i as the major index.
void append_pair_entries(const CMatrix& op, cplx factor, std::size_t i, std::size_t j, const HilbertSpace& space,
                         std::vector<Entry>& out) {
  const int dj = space.local_dim(j);
  const std::int64_t si = space.stride(i), sj = space.stride(j);
  const std::int64_t dim = space.dim();
  for (std::int64_t col = 0; col < dim; ++col) {
    const int ai = space.digit(col, i), aj = space.digit(col, j);
    const std::int64_t base = col - ai * si - aj * sj;
    const Eigen::Index c = ai * dj + aj;
    for (Eigen::Index r = 0; r < op.rows(); ++r) {
      const cplx v = op(r, c);
      if (v != cplx(0.0)) out.push_back({base + (r / dj) * si + (r % dj) * sj, col, factor * v});
    }
  }
}

CMatrix pair_exchange(const SpinMatrices& si, const SpinMatrices& sj) {
  // S_i.S_j = Sz Sz + (S+ S- + S- S+)/2 keeps every term real.
  CMatrix m = kroneckerProduct(si.z, sj.z);
  m += 0.5 * kroneckerProduct(si.plus, sj.minus);
  m += 0.5 * kroneckerProduct(si.minus, sj.plus);
  return m;
}

}  // namespace

SparseOperator embed(const CMatrix& op, std::size_t site, const HilbertSpace& space) {
  if (site >= space.n_sites()) throw ShapeError("site index out of range");
  const int d = space.local_dim(site);
  if (op.rows() != d || op.cols() != d) throw ShapeError("local operator dimension does not match site");
  std::vector<Entry> entries;
  append_site_entries(op, 1.0, site, space, entries);
  const bool herm = (op - op.adjoint()).cwiseAbs().maxCoeff() <= 1e-13;
  return SparseOperator(space, entries, herm);
}

namespace {

const CMatrix& component(const SpinMatrices& sm, Axis axis) {
  switch (axis) {
    case Axis::x: return sm.x;
    case Axis::y: return sm.y;
    case Axis::z: return sm.z;
  }
  return sm.z;
}

SpinSite site_spin(const HilbertSpace& space, std::size_t site) {
  return SpinSite::from_twice(space.local_dim(site) - 1);
}

std::vector<std::size_t> all_sites(const HilbertSpace& space) {
  std::vector<std::size_t> s(space.n_sites());
  std::iota(s.begin(), s.end(), std::size_t{0});
  return s;
}

}  // namespace

SparseOperator total_component(Axis axis, std::span<const std::size_t> sites, const HilbertSpace& space) {
  std::vector<Entry> entries;
  for (auto s : sites) {
    if (s >= space.n_sites()) throw ShapeError("site index out of range");
    append_site_entries(component(spin_matrices(site_spin(space, s)), axis), 1.0, s, space, entries);
  }
  return SparseOperator(space, entries, true);
}

SparseOperator heisenberg_bond(std::size_t i, std::size_t j, double coupling, const HilbertSpace& space) {
  if (i == j) throw DomainError("bond endpoints must differ");
  if (i >= space.n_sites() || j >= space.n_sites()) throw ShapeError("site index out of range");
  std::vector<Entry> entries;
  append_pair_entries(pair_exchange(spin_matrices(site_spin(space, i)), spin_matrices(site_spin(space, j))), coupling,
                      i, j, space, entries);
  return SparseOperator(space, entries, true);
}

SparseOperator spin_squared(std::span<const std::size_t> sites, const HilbertSpace& space) {
  std::vector<std::size_t> list(sites.begin(), sites.end());
  if (list.empty()) list = all_sites(space);
  double diagonal = 0.0;
  std::vector<Entry> entries;
  for (auto s : list) {
    if (s >= space.n_sites()) throw ShapeError("site index out of range");
    const double sp = site_spin(space, s).spin();
    diagonal += sp * (sp + 1.0);
  }
  for (std::size_t a = 0; a < list.size(); ++a) {
    for (std::size_t b = a + 1; b < list.size(); ++b) {
      if (list[a] == list[b]) {
        // A repeated site contributes 2 S.S = 2 s(s+1).
        const double sp = site_spin(space, list[a]).spin();
        diagonal += 2.0 * sp * (sp + 1.0);
      } else {
        append_pair_entries(
            pair_exchange(spin_matrices(site_spin(space, list[a])), spin_matrices(site_spin(space, list[b]))), 2.0,
            list[a], list[b], space, entries);
      }
    }
  }
  if (diagonal != 0.0) {
    for (std::int64_t k = 0; k < space.dim(); ++k) entries.push_back({k, k, diagonal});
  }
  return SparseOperator(space, entries, true);
}

SparseOperator total_spin_squared(const HilbertSpace& space) { return spin_squared({}, space); }

CMatrix local_rotation_pi_about_y(int local_dim) {
  CMatrix u = CMatrix::Zero(local_dim, local_dim);
  // Basis index k carries m = s - k; -m sits at index d-1-k; (-1)^(s-m) = (-1)^k.
  for (int k = 0; k < local_dim; ++k) u(local_dim - 1 - k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return u;
}

SparseOperator spin_rotation_pi_about_y(const HilbertSpace& space) {
  std::vector<Entry> entries;
  const std::int64_t dim = space.dim();
  entries.reserve(static_cast<std::size_t>(dim));
  for (std::int64_t col = 0; col < dim; ++col) {
    std::int64_t row = 0;
    int sign = 1;
    for (std::size_t s = 0; s < space.n_sites(); ++s) {
      const int k = space.digit(col, s);
      const int d = space.local_dim(s);
      row += (d - 1 - k) * space.stride(s);
      if (k % 2 == 1) sign = -sign;
    }
    entries.push_back({row, col, cplx(sign)});
  }
  return SparseOperator(space, entries, false);
}

CMatrix psd_sqrt(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
  RVector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < 0.0) {
      if (ev(i) > -1e-13) {
        ev(i) = 0.0;
      } else {
        throw DomainError("matrix square root requires a positive semidefinite argument");
      }
    }
    ev(i) = std::sqrt(ev(i));
  }
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double kls_trace_inequality_residual(const CMatrix& c, const CMatrix& m, const CMatrix& n) {
  if (m.rows() != m.cols() || n.rows() != n.cols()) throw ShapeError("M and N must be square");
  if (c.rows() != m.rows() || c.cols() != n.rows()) throw ShapeError("c must be (dim M) x (dim N)");
  const CMatrix cl = psd_sqrt(c * c.adjoint());
  const CMatrix cr = psd_sqrt(c.adjoint() * c);
  const double left = (cl * m * cl * m.adjoint()).trace().real();
  const double right = (cr * n * cr * n.adjoint()).trace().real();
  const double cross = std::abs((c.adjoint() * m * c * n.adjoint()).trace());
  return 0.5 * (left + right) - cross;
}

}  // namespace pb::spinalg
