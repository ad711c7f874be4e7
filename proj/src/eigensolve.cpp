#include "physbench/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pb {

Eigen::Index EigenResult::ground_block_size() const {
  if (eigenvalues.size() == 0) return 0;
  const double e0 = eigenvalues(0);
  const double scale = std::max(1.0, std::abs(e0));
  Eigen::Index n = 1;
  while (n < eigenvalues.size() && eigenvalues(n) - e0 < degeneracy_tol * scale) ++n;
  return n;
}

void fix_phase(Eigen::Ref<CVector> v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > tol) {
      v *= std::conj(v(i)) / mag;
      v(i) = cplx(std::abs(v(i)), 0.0);
      return;
    }
  }
}

EigenResult eigensolve_dense(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense hermitian eigensolver failed");
  EigenResult r;
  r.eigenvalues = es.eigenvalues();
  r.eigenvectors = es.eigenvectors();
  for (Eigen::Index c = 0; c < r.eigenvectors.cols(); ++c) fix_phase(r.eigenvectors.col(c));
  return r;
}

namespace {

void orthogonalize(CVector& w, const CMatrix& basis, Eigen::Index ncols) {
  if (ncols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const CVector coeff = basis.leftCols(ncols).adjoint() * w;
    w -= basis.leftCols(ncols) * coeff;
  }
}

struct RitzPair {
  double value;
  CVector vector;
};

// Lowest eigenpair of `op` restricted to the orthogonal complement of the
// first `n_found` columns of `found`. Thick-restart Lanczos: the basis is
// projected explicitly and each restart keeps the lowest Ritz vectors plus
// the residual direction.
RitzPair lowest_in_complement(const SparseOperator& op, const CMatrix& found, Eigen::Index n_found,
                              const EigenOptions& opt, std::mt19937_64& rng) {
  const Eigen::Index dim = op.dim();
  const double scale = std::max(op.norm_bound(), 1e-300);
  const Eigen::Index m_max = std::min<Eigen::Index>(opt.krylov_dim, dim - n_found);
  const Eigen::Index keep = std::min<Eigen::Index>(std::max<Eigen::Index>(m_max / 3, 1), m_max - 1);

  std::normal_distribution<double> nd;
  const auto random_vector = [&] {
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = cplx(nd(rng), nd(rng));
    return v;
  };

  CMatrix basis(dim, m_max), applied(dim, m_max);
  Eigen::Index n = 0;
  // Appends `w` after orthogonalization; false when nothing new is left.
  const auto append = [&](CVector w) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        orthogonalize(w, basis, n);
        orthogonalize(w, found, n_found);
      }
      const double nrm = w.norm();
      if (nrm > 1e-10 * std::max(1.0, scale)) {
        basis.col(n) = w / nrm;
        applied.col(n) = op.apply(basis.col(n));
        ++n;
        return true;
      }
      w = random_vector();
    }
    return false;
  };

  if (!append(random_vector())) throw ConvergenceError("Lanczos start vector vanished after deflation");
  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    while (n < m_max) {
      if (!append(applied.col(n - 1))) break;
    }
    CMatrix t = basis.leftCols(n).adjoint() * applied.leftCols(n);
    t = 0.5 * (t + t.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(t);
    const double theta = es.eigenvalues()(0);
    CVector x = basis.leftCols(n) * es.eigenvectors().col(0);
    CVector r = applied.leftCols(n) * es.eigenvectors().col(0) - theta * x;
    orthogonalize(r, found, n_found);
    if (r.norm() <= opt.residual_tol * scale || n == dim - n_found) {
      orthogonalize(x, found, n_found);
      return {theta, x.normalized()};
    }
    const Eigen::Index k = std::min(keep, n);
    const CMatrix y = es.eigenvectors().leftCols(k);
    const CMatrix kept = basis.leftCols(n) * y;
    const CMatrix kept_applied = applied.leftCols(n) * y;
    basis.leftCols(k) = kept;
    applied.leftCols(k) = kept_applied;
    n = k;
    if (!append(r)) append(random_vector());
  }
  throw ConvergenceError("Lanczos did not converge within the restart limit");
}

}  // namespace

EigenResult eigensolve(const SparseOperator& op, Eigen::Index k, Which which, const EigenOptions& opt) {
  if (!op.is_hermitian()) throw DomainError("eigensolve requires a hermitian operator");
  const Eigen::Index dim = op.dim();
  if (k < 0 || k > dim) throw ShapeError("requested eigenpair count exceeds dimension");

  if (which == Which::full || dim <= opt.dense_cap) {
    EigenResult full = eigensolve_dense(op.to_dense());
    if (which == Which::full) return full;
    const Eigen::Index keep = std::max(k, full.ground_block_size());
    EigenResult r;
    r.eigenvalues = full.eigenvalues.head(keep);
    r.eigenvectors = full.eigenvectors.leftCols(keep);
    return r;
  }

  std::mt19937_64 rng(opt.seed);
  const Eigen::Index cap = std::min<Eigen::Index>(dim, std::max<Eigen::Index>(k, 1) + 64);
  CMatrix found(dim, cap);
  std::vector<double> values;
  const double tol_deg = EigenResult{}.degeneracy_tol;
  for (Eigen::Index n = 0; n < cap; ++n) {
    RitzPair p = lowest_in_complement(op, found, n, opt, rng);
    const bool in_block = n > 0 && p.value - values.front() < tol_deg * std::max(1.0, std::abs(values.front()));
    if (n >= k && !in_block) break;
    found.col(n) = p.vector;
    values.push_back(p.value);
  }

  const auto n = static_cast<Eigen::Index>(values.size());
  // Rayleigh-Ritz on the collected subspace: sorts values and fixes mixing.
  CMatrix v = found.leftCols(n);
  CMatrix hv(dim, n);
  for (Eigen::Index c = 0; c < n; ++c) hv.col(c) = op.apply(v.col(c));
  CMatrix small = v.adjoint() * hv;
  small = 0.5 * (small + small.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(small);
  EigenResult r;
  r.eigenvalues = es.eigenvalues();
  r.eigenvectors = v * es.eigenvectors();
  for (Eigen::Index c = 0; c < n; ++c) {
    r.eigenvectors.col(c).normalize();
    fix_phase(r.eigenvectors.col(c));
  }
  return r;
}

}  // namespace pb
