#include "physbench/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace pb::elliptic {

void EllipticParams::validate() const {
  if (!(tau.imag() > 0.0)) throw DomainError("modulus must have positive imaginary part");
  if (rank < 2) throw DomainError("rank must be at least 2");
}

cplx theta_with_cutoff(cplx u, cplx tau, double cutoff) {
  if (!(tau.imag() > 0.0)) throw DomainError("modulus must have positive imaginary part");
  auto term = [&](int j) {
    const double h = j + 0.5;
    return std::exp(cplx(0.0, kPi) * (h * h * tau + 2.0 * h * (u + 0.5)));
  };
  cplx sum = term(0) + term(-1);
  // Terms decay like exp(-pi Im(tau) h^2) once h exceeds the |Im u| growth.
  for (int j = 1; j < 10000; ++j) {
    const cplx a = term(j);
    const cplx b = term(-1 - j);
    sum += a + b;
    const double scale = std::max(1.0, std::abs(sum));
    if (std::abs(a) < cutoff * scale && std::abs(b) < cutoff * scale && (j + 0.5) * tau.imag() > std::abs(u.imag()))
      return sum;
  }
  throw ConvergenceError("theta series did not converge");
}

cplx theta(cplx u, cplx tau) { return theta_with_cutoff(u, tau, 1e-18); }

void guard_pole(cplx z, cplx tau, double tol) {
  const double n0 = std::round(z.imag() / tau.imag());
  for (double dn = -1; dn <= 1; ++dn) {
    const cplx w = z - (n0 + dn) * tau;
    const cplx r = w - std::round(w.real());
    if (std::abs(r) < tol) throw SingularError("theta argument lies on the period lattice");
  }
}

namespace {

cplx th(cplx u, const EllipticParams& p) { return theta(u, p.tau); }

cplx th_den(cplx u, const EllipticParams& p) {
  guard_pole(u, p.tau);
  return theta(u, p.tau);
}

void check_index(int i, const EllipticParams& p) {
  if (i < 0 || i >= p.rank) throw ShapeError("step index out of range");
}

}  // namespace

cplx boltzmann_weight(WeightType type, std::span<const cplx> lambda, int i, int j, cplx u, const EllipticParams& p) {
  p.validate();
  if (static_cast<int>(lambda.size()) != p.rank) throw ShapeError("weight vector must have rank entries");
  check_index(i, p);
  check_index(j, p);
  if (type == WeightType::same) return 1.0;
  if (i == j) throw DomainError("adjacent weights need distinct steps");
  const cplx lij = lambda[static_cast<std::size_t>(i)] - lambda[static_cast<std::size_t>(j)];
  const cplx den = th_den(u + p.eta, p) * th_den(lij, p);
  if (type == WeightType::adjacent_ii) return th(p.eta, p) * th(-u + lij, p) / den;
  return th(u, p) * th(p.eta + lij, p) / den;
}

cplx face_weight(std::span<const cplx> start, int i, int j, int k, cplx u, const EllipticParams& p) {
  if (i == j) return k == i ? cplx(1.0) : cplx(0.0);
  if (k == i) return boltzmann_weight(WeightType::adjacent_ii, start, i, j, u, p);
  if (k == j) return boltzmann_weight(WeightType::adjacent_ij, start, i, j, u, p);
  return 0.0;
}

CVector shifted(std::span<const cplx> lambda, std::span<const int> steps, const EllipticParams& p) {
  CVector out(static_cast<Eigen::Index>(lambda.size()));
  for (std::size_t a = 0; a < lambda.size(); ++a) out(static_cast<Eigen::Index>(a)) = lambda[a];
  const double n = static_cast<double>(lambda.size());
  for (int s : steps) {
    check_index(s, p);
    for (Eigen::Index a = 0; a < out.size(); ++a) out(a) -= p.eta / n;
    out(s) += p.eta;
  }
  return out;
}

namespace {

using Path = std::vector<int>;
using PathSum = std::map<Path, cplx>;

// Exchange of the steps at positions pos, pos+1 with spectral parameter u.
PathSum apply_exchange(std::size_t pos, const PathSum& in, cplx u, std::span<const cplx> lambda, const EllipticParams& p) {
  PathSum out;
  for (const auto& [path, amp] : in) {
    const CVector start = shifted(lambda, std::span<const int>(path.data(), pos), p);
    const std::span<const cplx> st(start.data(), static_cast<std::size_t>(start.size()));
    const int a = path[pos], b = path[pos + 1];
    std::array<std::pair<int, int>, 2> cand{{{a, b}, {b, a}}};
    const int n_cand = a == b ? 1 : 2;
    for (int c = 0; c < n_cand; ++c) {
      const cplx w = face_weight(st, a, b, cand[static_cast<std::size_t>(c)].first, u, p);
      if (w == cplx(0.0)) continue;
      Path q = path;
      q[pos] = cand[static_cast<std::size_t>(c)].first;
      q[pos + 1] = cand[static_cast<std::size_t>(c)].second;
      out[q] += amp * w;
    }
  }
  return out;
}

}  // namespace

double dybe_residual(std::span<const cplx> lambda, cplx u, cplx v, const EllipticParams& p) {
  p.validate();
  if (static_cast<int>(lambda.size()) != p.rank) throw ShapeError("weight vector must have rank entries");
  double res = 0.0;
  const int n = p.rank;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const PathSum start{{{a, b, c}, 1.0}};
        const PathSum lhs = apply_exchange(0, apply_exchange(1, apply_exchange(0, start, u, lambda, p), u + v, lambda, p), v, lambda, p);
        const PathSum rhs = apply_exchange(1, apply_exchange(0, apply_exchange(1, start, v, lambda, p), u + v, lambda, p), u, lambda, p);
        PathSum diff = lhs;
        for (const auto& [k, val] : rhs) diff[k] -= val;
        for (const auto& [k, val] : diff) res = std::max(res, std::abs(val));
      }
    }
  }
  return res;
}

cplx ruijsenaars_L(std::span<const cplx> lambda, std::span<const cplx> mu, int i, int j, cplx u, const EllipticParams& p) {
  p.validate();
  if (static_cast<int>(lambda.size()) != p.rank || static_cast<int>(mu.size()) != p.rank)
    throw ShapeError("weight vectors must have rank entries");
  check_index(i, p);
  check_index(j, p);
  const cplx shift = p.c * p.eta / static_cast<double>(p.rank);
  const auto si = static_cast<std::size_t>(i);
  const auto sj = static_cast<std::size_t>(j);
  cplx r = th(shift + u + lambda[si] - mu[sj], p) / th_den(u, p);
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    if (k == si) continue;
    r *= th(shift + lambda[k] - mu[sj], p) / th_den(lambda[k] - lambda[si], p);
  }
  return r;
}

double rll_residual(std::span<const cplx> lambda, std::span<const cplx> mu, cplx u, cplx v, const EllipticParams& p) {
  p.validate();
  const int n = p.rank;
  auto sp = [](const CVector& x) { return std::span<const cplx>(x.data(), static_cast<std::size_t>(x.size())); };
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          cplx lhs = 0.0;
          const std::array<std::pair<int, int>, 2> left{{{i, j}, {j, i}}};
          for (int t = 0; t < (i == j ? 1 : 2); ++t) {
            const auto [k, l] = left[static_cast<std::size_t>(t)];
            const cplx w = face_weight(lambda, k, l, i, u - v, p);
            if (w == cplx(0.0)) continue;
            const std::array<int, 1> sk{k}, sa{a};
            lhs += w * ruijsenaars_L(lambda, mu, k, a, u, p) *
                   ruijsenaars_L(sp(shifted(lambda, sk, p)), sp(shifted(mu, sa, p)), l, b, v, p);
          }
          cplx rhs = 0.0;
          const std::array<std::pair<int, int>, 2> right{{{a, b}, {b, a}}};
          for (int t = 0; t < (a == b ? 1 : 2); ++t) {
            const auto [c, d] = right[static_cast<std::size_t>(t)];
            const cplx w = face_weight(mu, a, b, c, u - v, p);
            if (w == cplx(0.0)) continue;
            const std::array<int, 1> si{i}, sc{c};
            rhs += ruijsenaars_L(lambda, mu, i, c, v, p) *
                   ruijsenaars_L(sp(shifted(lambda, si, p)), sp(shifted(mu, sc, p)), j, d, u, p) * w;
          }
          res = std::max(res, std::abs(lhs - rhs));
        }
      }
    }
  }
  return res;
}

LatticeWavefunction::LatticeWavefunction(CVector base, std::vector<int> lo, std::vector<int> hi)
    : base_(std::move(base)), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (base_.size() < 2) throw DomainError("rank must be at least 2");
  if (lo_.size() != static_cast<std::size_t>(base_.size() - 1) || hi_.size() != lo_.size())
    throw ShapeError("window needs rank-1 coordinate bounds");
  std::size_t total = 1;
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (hi_[k] < lo_[k]) throw ShapeError("empty window");
    total *= static_cast<std::size_t>(hi_[k] - lo_[k] + 1);
  }
  values_.assign(total, 0.0);
  valid_.assign(total, true);
}

std::optional<std::size_t> LatticeWavefunction::index(const std::vector<int>& m) const {
  if (m.size() != lo_.size()) throw ShapeError("coordinate count mismatch");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] < lo_[k] || m[k] > hi_[k]) return std::nullopt;
    idx = idx * static_cast<std::size_t>(hi_[k] - lo_[k] + 1) + static_cast<std::size_t>(m[k] - lo_[k]);
  }
  return idx;
}

std::vector<int> LatticeWavefunction::coords(std::size_t idx) const {
  std::vector<int> m(lo_.size());
  for (std::size_t k = lo_.size(); k-- > 0;) {
    const auto w = static_cast<std::size_t>(hi_[k] - lo_[k] + 1);
    m[k] = lo_[k] + static_cast<int>(idx % w);
    idx /= w;
  }
  return m;
}

CVector LatticeWavefunction::lambda_at(const std::vector<int>& m, cplx eta) const {
  CVector lam = base_;
  const double n = static_cast<double>(base_.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    for (Eigen::Index a = 0; a < lam.size(); ++a) lam(a) -= eta * static_cast<double>(m[k]) / n;
    lam(static_cast<Eigen::Index>(k)) += eta * static_cast<double>(m[k]);
  }
  return lam;
}

std::optional<cplx> LatticeWavefunction::at(const std::vector<int>& m) const {
  const auto idx = index(m);
  if (!idx || !valid_[*idx]) return std::nullopt;
  return values_[*idx];
}

void LatticeWavefunction::set(const std::vector<int>& m, cplx value) {
  const auto idx = index(m);
  if (!idx) throw ShapeError("point outside the window");
  values_[*idx] = value;
  valid_[*idx] = true;
}

std::vector<int> shift_down(const std::vector<int>& m, int i, int rank) {
  std::vector<int> out = m;
  // e_N = -(e_1 + ... + e_{N-1}) for traceless unit vectors.
  if (i < rank - 1) {
    out[static_cast<std::size_t>(i)] -= 1;
  } else {
    for (auto& x : out) x += 1;
  }
  return out;
}

cplx ruijsenaars_coefficient(std::span<const cplx> lambda, int i, const EllipticParams& p) {
  check_index(i, p);
  const cplx shift = p.c * p.eta / static_cast<double>(p.rank);
  cplx r = 1.0;
  for (int j = 0; j < p.rank; ++j) {
    if (j == i) continue;
    const cplx lji = lambda[static_cast<std::size_t>(j)] - lambda[static_cast<std::size_t>(i)];
    r *= th(shift + lji, p) / th_den(lji, p);
  }
  return r;
}

LatticeWavefunction ruijsenaars_apply(const LatticeWavefunction& psi, const EllipticParams& p) {
  p.validate();
  if (psi.rank() != p.rank) throw ShapeError("wavefunction rank does not match parameters");
  LatticeWavefunction out = psi;
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    const auto m = psi.coords(idx);
    const CVector lam = psi.lambda_at(m, p.eta);
    const std::span<const cplx> ls(lam.data(), static_cast<std::size_t>(lam.size()));
    cplx acc = 0.0;
    bool ok = true;
    for (int i = 0; i < p.rank && ok; ++i) {
      const auto val = psi.at(shift_down(m, i, p.rank));
      if (!val) {
        ok = false;
        break;
      }
      acc += ruijsenaars_coefficient(ls, i, p) * *val;
    }
    if (ok) {
      out.set(m, acc);
    } else {
      out.invalidate(idx);
    }
  }
  return out;
}

}  // namespace pb::elliptic
