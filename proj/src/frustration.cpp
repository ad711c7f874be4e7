#include "physbench/frustration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "physbench/spinalg.hpp"

namespace pb::frustration {

namespace {

std::optional<ReflectionSplit> find_reflection(const CheckerboardLattice& lat) {
  const int lx = lat.lx();
  const int ly = lat.ly();
  if (ly % 2 == 0) {
    ReflectionSplit r;
    r.direction = ReflectionSplit::Direction::y;
    for (int y = 0; y < ly / 2; ++y) {
      for (int x = 0; x < lx; ++x) {
        r.left.push_back(lat.site(x, y));
        r.right.push_back(lat.site(x, ly - 1 - y));
      }
    }
    return r;
  }
  if (lx % 2 == 0) {
    ReflectionSplit r;
    r.direction = ReflectionSplit::Direction::x;
    for (int x = 0; x < lx / 2; ++x) {
      for (int y = 0; y < ly; ++y) {
        r.left.push_back(lat.site(x, y));
        r.right.push_back(lat.site(lx - 1 - x, y));
      }
    }
    return r;
  }
  return std::nullopt;
}

}  // namespace

CheckerboardLattice::CheckerboardLattice(int lx, int ly, bool periodic_x, bool periodic_y)
    : lx_(lx), ly_(ly), px_(periodic_x), py_(periodic_y) {
  if (lx < 2 || ly < 2) throw DomainError("checkerboard needs at least two sites per direction");
  if ((lx * ly) % 2 != 0) throw DomainError("checkerboard site count must be even");
  if ((px_ && lx % 2 != 0) || (py_ && ly % 2 != 0)) {
    throw DomainError("periodic direction must have even length, otherwise a box is left dangling at the seam");
  }
  const int nx = px_ ? lx : lx - 1;
  const int ny = py_ ? ly : ly - 1;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      if ((x + y) % 2 != 0) continue;
      const int x1 = (x + 1) % lx;
      const int y1 = (y + 1) % ly;
      boxes_.push_back({site(x, y), site(x1, y), site(x, y1), site(x1, y1)});
    }
  }
  if (boxes_.empty()) throw DomainError("lattice contains no crossed plaquette");
  for (const auto& b : boxes_) {
    for (int a = 0; a < 4; ++a) {
      for (int c = a + 1; c < 4; ++c) bonds_.push_back({b[a], b[c]});
    }
  }
  reflection_ = find_reflection(*this);
}

Lattice build_checkerboard(int lx, int ly, bool periodic_x, bool periodic_y, double spin) {
  CheckerboardLattice lat(lx, ly, periodic_x, periodic_y);
  HilbertSpace space = HilbertSpace::uniform_spin(lat.n_sites(), SpinSite::from_spin(spin));
  return {std::move(lat), std::move(space)};
}

Lattice build_checkerboard(int lx, int ly, bool periodic, double spin) {
  return build_checkerboard(lx, ly, periodic, periodic, spin);
}

BoxFields BoxFields::single_box(std::size_t box, double b, std::size_t n_boxes) {
  if (box >= n_boxes) throw ShapeError("box index out of range");
  std::vector<double> v(n_boxes, 0.0);
  v[box] = b;
  return BoxFields(std::move(v));
}

SparseOperator checkerboard_hamiltonian(const CheckerboardLattice& lat, const HilbertSpace& space,
                                        const std::optional<BoxFields>& fields) {
  if (space.n_sites() != lat.n_sites()) throw ShapeError("space does not match lattice");
  if (fields && fields->values().size() != lat.boxes().size()) throw ShapeError("field count must equal box count");
  SparseOperator h = SparseOperator::zero(space);
  const auto identity = SparseOperator::identity(space);
  for (std::size_t k = 0; k < lat.boxes().size(); ++k) {
    const auto& box = lat.boxes()[k];
    h = h + 0.5 * spinalg::spin_squared(box, space);
    const double b = fields ? fields->values()[k] : 0.0;
    if (b != 0.0) {
      h = h - b * spinalg::total_component(spinalg::Axis::z, box, space);
      h = h + (0.5 * b * b) * identity;
    }
  }
  return h.with_checked_hermitian_flag(1e-12);
}

double GroundStateReport::ice_rule_max_abs() const {
  double mx = 0.0;
  for (const auto& v : box_s3) {
    for (double x : v) mx = std::max(mx, std::abs(x));
  }
  for (const auto& v : box_s1) {
    for (double x : v) mx = std::max(mx, std::abs(x));
  }
  return mx;
}

namespace {

// Basis indices whose total 2*S3 equals the smallest attainable |2*S3|.
std::vector<std::int64_t> minimal_magnetization_sector(const HilbertSpace& space, int& twice_m) {
  int twice_max = 0;
  for (std::size_t s = 0; s < space.n_sites(); ++s) twice_max += space.local_dim(s) - 1;
  twice_m = twice_max % 2;
  std::vector<std::int64_t> out;
  for (std::int64_t idx = 0; idx < space.dim(); ++idx) {
    int twice = twice_max;
    for (std::size_t s = 0; s < space.n_sites(); ++s) twice -= 2 * space.digit(idx, s);
    if (twice == twice_m) out.push_back(idx);
  }
  return out;
}

}  // namespace

GroundStateReport ground_state_report(const SparseOperator& h, const CheckerboardLattice& lat,
                                      const HilbertSpace& space, const GroundStateOptions& opt) {
  if (space.dim() > opt.dimension_cap) throw DomainError("Hilbert space exceeds the configured dimension cap");
  GroundStateReport rep;
  const SparseOperator s2 = spinalg::total_spin_squared(space);
  if (space.dim() <= opt.sector_threshold) {
    const EigenResult er = eigensolve(h, 1, Which::lowest, opt.eigen);
    rep.e0 = er.eigenvalues(0);
    rep.degeneracy = er.ground_block_size();
    rep.ground_vectors = er.ground_block();
  } else {
    int twice_m = 0;
    const auto sector = minimal_magnetization_sector(space, twice_m);
    const auto n_sub = static_cast<std::int64_t>(sector.size());
    SparseOperator::Matrix embed(space.dim(), n_sub);
    std::vector<Eigen::Triplet<cplx, std::int64_t>> trips;
    for (std::int64_t k = 0; k < n_sub; ++k) trips.emplace_back(sector[static_cast<std::size_t>(k)], k, 1.0);
    embed.setFromTriplets(trips.begin(), trips.end());
    SparseOperator::Matrix block = embed.adjoint() * h.matrix() * embed;
    const SparseOperator h_sub(HilbertSpace({static_cast<int>(n_sub)}), std::move(block), true);
    const EigenResult er = eigensolve(h_sub, 1, Which::lowest, opt.eigen);
    rep.e0 = er.eigenvalues(0);
    CMatrix lifted = embed * er.ground_block();
    // Resolve the block into S^2 eigenvectors and count each multiplet fully.
    CMatrix proj = lifted.adjoint() * (s2.matrix() * lifted);
    proj = 0.5 * (proj + proj.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(proj);
    rep.ground_vectors = lifted * es.eigenvectors();
    rep.degeneracy = 0;
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
      const double s = 0.5 * (std::sqrt(1.0 + 4.0 * std::max(0.0, es.eigenvalues()(c))) - 1.0);
      rep.degeneracy += static_cast<Eigen::Index>(std::lround(2.0 * s)) + 1;
      fix_phase(rep.ground_vectors.col(c));
    }
    rep.sector_magnetization = 0.5 * twice_m;
  }

  std::vector<SparseOperator> s3, s1;
  for (const auto& box : lat.boxes()) {
    s3.push_back(spinalg::total_component(spinalg::Axis::z, box, space));
    s1.push_back(spinalg::total_component(spinalg::Axis::x, box, space));
  }
  for (Eigen::Index v = 0; v < rep.ground_vectors.cols(); ++v) {
    const CVector psi = rep.ground_vectors.col(v);
    rep.stot.push_back(s2.expectation(psi).real());
    std::vector<double> m3, m1;
    for (std::size_t b = 0; b < s3.size(); ++b) {
      m3.push_back(s3[b].expectation(psi).real());
      m1.push_back(s1[b].expectation(psi).real());
    }
    rep.box_s3.push_back(std::move(m3));
    rep.box_s1.push_back(std::move(m1));
  }
  return rep;
}

namespace {

const ReflectionSplit& require_split(const CheckerboardLattice& lat) {
  if (!lat.reflection()) throw DomainError("lattice admits no reflection split with an even cut");
  return *lat.reflection();
}

// Global index of the product state with `left_index` on the left sites and
// `right_index` on the mirrored right sites.
std::vector<std::int64_t> split_index_table(const ReflectionSplit& split, const HilbertSpace& space,
                                            std::int64_t& dim_half) {
  dim_half = 1;
  for (auto s : split.left) dim_half *= space.local_dim(s);
  std::vector<std::int64_t> table(static_cast<std::size_t>(dim_half * dim_half));
  const std::size_t n = split.left.size();
  for (std::int64_t a = 0; a < dim_half; ++a) {
    for (std::int64_t b = 0; b < dim_half; ++b) {
      std::int64_t ra = a, rb = b, idx = 0;
      for (std::size_t k = n; k-- > 0;) {
        const int d = space.local_dim(split.left[k]);
        idx += (ra % d) * space.stride(split.left[k]);
        idx += (rb % d) * space.stride(split.right[k]);
        ra /= d;
        rb /= d;
      }
      table[static_cast<std::size_t>(a * dim_half + b)] = idx;
    }
  }
  return table;
}

CMatrix right_rotation(const ReflectionSplit& split, const HilbertSpace& space) {
  std::vector<int> dims;
  for (auto s : split.right) dims.push_back(space.local_dim(s));
  const HilbertSpace half(dims);
  return spinalg::spin_rotation_pi_about_y(half).to_dense();
}

}  // namespace

CoeffMatrix coefficient_matrix(const CVector& state, const CheckerboardLattice& lat, const HilbertSpace& space,
                               bool rotated) {
  const auto& split = require_split(lat);
  if (state.size() != space.dim()) throw ShapeError("state length does not match space");
  std::int64_t dh = 0;
  const auto table = split_index_table(split, space, dh);
  CMatrix psi(dh, dh);
  for (std::int64_t a = 0; a < dh; ++a) {
    for (std::int64_t b = 0; b < dh; ++b) psi(a, b) = state(table[static_cast<std::size_t>(a * dh + b)]);
  }
  if (!rotated) return {psi, false};
  // psi = c U^T, so c = psi conj(U).
  return {psi * right_rotation(split, space).conjugate(), true};
}

CVector state_from_coefficients(const CoeffMatrix& cm, const CheckerboardLattice& lat, const HilbertSpace& space) {
  const auto& split = require_split(lat);
  std::int64_t dh = 0;
  const auto table = split_index_table(split, space, dh);
  if (cm.c.rows() != dh || cm.c.cols() != dh) throw ShapeError("coefficient matrix has wrong shape");
  const CMatrix psi = cm.rotated ? CMatrix(cm.c * right_rotation(split, space).transpose()) : cm.c;
  CVector out = CVector::Zero(space.dim());
  for (std::int64_t a = 0; a < dh; ++a) {
    for (std::int64_t b = 0; b < dh; ++b) out(table[static_cast<std::size_t>(a * dh + b)]) = psi(a, b);
  }
  return out;
}

CVector canonical_state(const CheckerboardLattice& lat, const HilbertSpace& space) {
  const auto& split = require_split(lat);
  std::int64_t dh = 1;
  for (auto s : split.left) dh *= space.local_dim(s);
  CoeffMatrix cm{CMatrix::Identity(dh, dh) / std::sqrt(static_cast<double>(dh)), true};
  return state_from_coefficients(cm, lat, space);
}

PositivityReport positivity_upgrade(const CVector& state, const SparseOperator& h, const CheckerboardLattice& lat,
                                    const HilbertSpace& space) {
  const CoeffMatrix cm = coefficient_matrix(state, lat, space, true);
  const CMatrix sym = 0.5 * (cm.c + cm.c.transpose());
  const CMatrix anti = 0.5 * (cm.c - cm.c.transpose());
  const double ns = sym.norm();
  const double na = anti.norm();
  if (ns < 1e-14 && na < 1e-14) throw DomainError("coefficient matrix has neither symmetric nor antisymmetric part");
  PositivityReport rep;
  rep.symmetric_part_used = ns >= na;
  const CMatrix part = rep.symmetric_part_used ? CMatrix(sym / ns) : CMatrix(anti / na);

  const CVector psi = state_from_coefficients({part, true}, lat, space);
  rep.energy_input = h.expectation(psi).real();

  CMatrix cl = spinalg::psd_sqrt(part * part.adjoint());
  cl /= cl.norm();
  rep.upgraded_state = state_from_coefficients({cl, true}, lat, space);
  rep.energy_upgraded = h.expectation(rep.upgraded_state).real();
  return rep;
}

cplx canonical_spin_zero_overlap(const CVector& state, const CheckerboardLattice& lat, const HilbertSpace& space) {
  const CoeffMatrix cm = coefficient_matrix(state, lat, space, true);
  return cm.c.trace() / std::sqrt(static_cast<double>(cm.c.rows()));
}

std::pair<double, double> richardson_second_derivative(const std::function<double(double)>& f,
                                                       const std::vector<double>& steps) {
  if (steps.empty()) throw DomainError("step ladder is empty");
  const double f0 = f(0.0);
  std::vector<double> level;
  for (double h : steps) level.push_back((f(h) - 2.0 * f0 + f(-h)) / (h * h));
  // Steps halve, so each pass cancels the next even power of h.
  double factor = 4.0;
  double last_change = 0.0;
  while (level.size() > 1) {
    std::vector<double> next;
    for (std::size_t k = 0; k + 1 < level.size(); ++k) next.push_back((factor * level[k + 1] - level[k]) / (factor - 1.0));
    last_change = std::abs(next.back() - level.back());
    level = std::move(next);
    factor *= 4.0;
  }
  return {level.front(), last_change};
}

SusceptibilityReport susceptibility_check(const CheckerboardLattice& lat, const HilbertSpace& space,
                                          const std::vector<double>& samples, const GroundStateOptions& opt) {
  if (!lat.fully_periodic()) throw DomainError("the global susceptibility bound needs a periodic lattice");
  const std::size_t nb = lat.boxes().size();
  const double lambda = static_cast<double>(lat.n_sites());
  const SparseOperator h0 = checkerboard_hamiltonian(lat, space);
  auto ground = [&](const SparseOperator& h) { return eigensolve(h, 1, Which::lowest, opt.eigen).eigenvalues(0); };
  const double e0 = ground(h0);

  auto full_energy = [&](double b) { return ground(checkerboard_hamiltonian(lat, space, BoxFields::homogeneous(b, nb))); };
  auto zeeman = [&](double b) { return full_energy(b) - lambda / 16.0 * b * b; };

  SusceptibilityReport rep;
  for (double b : samples) {
    const double ef = full_energy(b);
    rep.fields.push_back(b);
    rep.zeeman_energy.push_back(ef - lambda / 16.0 * b * b);
    rep.bound_residuals.push_back(b == 0.0 ? 0.0 : ef - e0);
  }
  const std::vector<double> ladder{0.2, 0.1, 0.05};
  const auto [d2, err] = richardson_second_derivative(zeeman, ladder);
  rep.chi_estimate = -d2 / lambda;
  rep.chi_error = err / lambda;

  auto local_full = [&](double b) { return ground(checkerboard_hamiltonian(lat, space, BoxFields::single_box(0, b, nb))); };
  auto local_zeeman = [&](double b) { return local_full(b) - 0.5 * b * b; };
  for (double b : samples) rep.local_residuals.push_back(b == 0.0 ? 0.0 : local_full(b) - e0);
  const auto [l2, lerr] = richardson_second_derivative(local_zeeman, ladder);
  rep.chi_local_estimate = -l2 / 4.0;
  rep.chi_local_error = lerr / 4.0;
  return rep;
}

double ThermalReport::min_residual() const {
  double mn = 0.0;
  for (const auto& row : residuals) {
    for (double r : row) mn = std::min(mn, r);
  }
  return mn;
}

namespace {

double free_energy(const RVector& levels, double beta) {
  const double emin = levels.minCoeff();
  double z = 0.0;
  for (Eigen::Index i = 0; i < levels.size(); ++i) z += std::exp(-beta * (levels(i) - emin));
  return emin - std::log(z) / beta;
}

}  // namespace

ThermalReport thermal_check(const CheckerboardLattice& lat, const HilbertSpace& space, const std::vector<double>& betas,
                            const std::vector<double>& fields) {
  if (lat.n_sites() > 8) throw DomainError("finite-temperature check is limited to 8 sites");
  if (!lat.fully_periodic()) throw DomainError("finite-temperature bound needs a periodic lattice");
  const std::size_t nb = lat.boxes().size();
  const CMatrix h0 = checkerboard_hamiltonian(lat, space).to_dense();
  const Eigen::SelfAdjointEigenSolver<CMatrix> es0(h0);
  const RVector lv0 = es0.eigenvalues();
  std::vector<std::size_t> all(lat.n_sites());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const CMatrix s3 = spinalg::total_component(spinalg::Axis::z, all, space).to_dense();

  std::vector<RVector> spectra;
  for (double b : fields) {
    const CMatrix hb = checkerboard_hamiltonian(lat, space, BoxFields::homogeneous(b, nb)).to_dense();
    spectra.push_back(Eigen::SelfAdjointEigenSolver<CMatrix>(hb, Eigen::EigenvaluesOnly).eigenvalues());
  }
  ThermalReport rep{betas, fields, {}, {}};
  const CMatrix s3_eig = es0.eigenvectors().adjoint() * s3 * es0.eigenvectors();
  for (double beta : betas) {
    const double f0 = free_energy(lv0, beta);
    std::vector<double> row;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      // The squared-field Hamiltonian already carries the (Lambda/16) B^2 constant.
      row.push_back(free_energy(spectra[k], beta) - f0);
    }
    rep.residuals.push_back(std::move(row));
    const double emin = lv0.minCoeff();
    double z = 0.0, m = 0.0;
    for (Eigen::Index i = 0; i < lv0.size(); ++i) {
      const double w = std::exp(-beta * (lv0(i) - emin));
      z += w;
      m += w * s3_eig(i, i).real();
    }
    rep.zero_field_magnetization.push_back(m / z);
  }
  return rep;
}

}  // namespace pb::frustration
