#include "physbench/sparse.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

namespace pb {

SpinSite SpinSite::from_spin(double s) {
  const double twice = 2.0 * s;
  const double rounded = std::round(twice);
  if (!(std::abs(twice - rounded) < 1e-12) || rounded < 1.0) {
    throw DomainError("spin must be a positive half-integer, got " + std::to_string(s));
  }
  return SpinSite(static_cast<int>(rounded));
}

SpinSite SpinSite::from_twice(int twice_spin) {
  if (twice_spin < 1) throw DomainError("2s must be a positive integer");
  return SpinSite(twice_spin);
}

HilbertSpace::HilbertSpace(std::vector<int> local_dims) : dims_(std::move(local_dims)) {
  strides_.assign(dims_.size(), 1);
  total_ = 1;
  for (std::size_t k = dims_.size(); k-- > 0;) {
    if (dims_[k] < 1) throw ShapeError("local dimension must be positive");
    strides_[k] = total_;
    total_ *= dims_[k];
  }
}

HilbertSpace HilbertSpace::of_spins(std::span<const SpinSite> sites) {
  std::vector<int> d;
  d.reserve(sites.size());
  for (const auto& s : sites) d.push_back(s.dim());
  return HilbertSpace(std::move(d));
}

HilbertSpace HilbertSpace::uniform_spin(std::size_t n_sites, SpinSite site) {
  return HilbertSpace(std::vector<int>(n_sites, site.dim()));
}

namespace {

void check_hermitian(const SparseOperator::Matrix& m, double tol) {
  const SparseOperator::Matrix diff = m - SparseOperator::Matrix(m.adjoint());
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseOperator::Matrix::InnerIterator it(diff, k); it; ++it) {
      if (std::abs(it.value()) > tol) throw DomainError("operator flagged hermitian is not self-adjoint");
    }
  }
}

bool is_self_adjoint(const SparseOperator::Matrix& m, double tol) {
  try {
    check_hermitian(m, tol);
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

}  // namespace

SparseOperator::SparseOperator(HilbertSpace space, std::span<const Entry> entries, bool hermitian)
    : space_(std::move(space)), m_(space_.dim(), space_.dim()), hermitian_(hermitian) {
  std::vector<Eigen::Triplet<cplx, std::int64_t>> trip;
  trip.reserve(entries.size());
  const auto n = space_.dim();
  for (const auto& e : entries) {
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) throw ShapeError("operator entry index out of range");
    trip.emplace_back(e.row, e.col, e.value);
  }
  m_.setFromTriplets(trip.begin(), trip.end());
  m_.prune(cplx(0.0));
  m_.makeCompressed();
  if (hermitian_) check_hermitian(m_, 1e-13);
}

SparseOperator::SparseOperator(HilbertSpace space, Matrix matrix, bool hermitian)
    : space_(std::move(space)), m_(std::move(matrix)), hermitian_(hermitian) {
  if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) throw ShapeError("matrix does not match space dimension");
  m_.prune(cplx(0.0));
  m_.makeCompressed();
  if (hermitian_) check_hermitian(m_, 1e-13);
}

SparseOperator SparseOperator::identity(const HilbertSpace& space) {
  Matrix m(space.dim(), space.dim());
  m.setIdentity();
  return SparseOperator(space, std::move(m), true);
}

SparseOperator SparseOperator::zero(const HilbertSpace& space, bool hermitian) {
  return SparseOperator(space, Matrix(space.dim(), space.dim()), hermitian);
}

SparseOperator SparseOperator::from_dense(const HilbertSpace& space, const CMatrix& m, bool hermitian) {
  if (m.rows() != space.dim() || m.cols() != space.dim()) throw ShapeError("dense matrix does not match space dimension");
  Matrix s = m.sparseView(cplx(0.0), 0.0);
  return SparseOperator(space, std::move(s), hermitian);
}

CVector SparseOperator::apply(const CVector& v) const {
  if (v.size() != dim()) throw ShapeError("vector length does not match operator dimension");
  return m_ * v;
}

cplx SparseOperator::expectation(const CVector& v) const { return v.dot(apply(v)); }

CMatrix SparseOperator::to_dense() const { return CMatrix(m_); }

SparseOperator SparseOperator::adjoint() const { return SparseOperator(space_, Matrix(m_.adjoint()), hermitian_); }

double SparseOperator::max_abs_entry() const {
  double mx = 0.0;
  for (int k = 0; k < m_.outerSize(); ++k) {
    for (Matrix::InnerIterator it(m_, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  }
  return mx;
}

double SparseOperator::norm_bound() const {
  double mx = 0.0;
  for (int k = 0; k < m_.outerSize(); ++k) {
    double row = 0.0;
    for (Matrix::InnerIterator it(m_, k); it; ++it) row += std::abs(it.value());
    mx = std::max(mx, row);
  }
  return mx;
}

SparseOperator SparseOperator::with_checked_hermitian_flag(double tol) const {
  SparseOperator out = *this;
  out.hermitian_ = is_self_adjoint(m_, tol);
  return out;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
  char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  os.write(buf, 8);
}

template <typename T>
bool get_le(std::istream& is, T& value) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) return false;
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  value = std::bit_cast<T>(bits);
  return true;
}

}  // namespace

void SparseOperator::dump_binary(std::ostream& os) const {
  for (int k = 0; k < m_.outerSize(); ++k) {
    for (Matrix::InnerIterator it(m_, k); it; ++it) {
      put_le(os, static_cast<std::uint64_t>(it.row()));
      put_le(os, static_cast<std::uint64_t>(it.col()));
      put_le(os, it.value().real());
      put_le(os, it.value().imag());
    }
  }
}

SparseOperator SparseOperator::load_binary(const HilbertSpace& space, std::istream& is, bool hermitian) {
  std::vector<Entry> entries;
  for (;;) {
    std::uint64_t r = 0, c = 0;
    double re = 0.0, im = 0.0;
    if (!get_le(is, r)) break;
    if (!get_le(is, c) || !get_le(is, re) || !get_le(is, im)) throw ShapeError("truncated operator record stream");
    entries.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(c), cplx(re, im)});
  }
  return SparseOperator(space, entries, hermitian);
}

namespace {
void require_same_space(const SparseOperator& a, const SparseOperator& b) {
  if (!(a.space() == b.space())) throw ShapeError("operators act on different spaces");
}
}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  require_same_space(a, b);
  return SparseOperator(a.space_, SparseOperator::Matrix(a.m_ + b.m_), false)
      .with_checked_hermitian_flag();
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  require_same_space(a, b);
  return SparseOperator(a.space_, SparseOperator::Matrix(a.m_ - b.m_), false)
      .with_checked_hermitian_flag();
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  require_same_space(a, b);
  return SparseOperator(a.space_, SparseOperator::Matrix(a.m_ * b.m_), false);
}

SparseOperator operator*(cplx s, const SparseOperator& a) {
  const bool herm = a.hermitian_ && std::abs(s.imag()) == 0.0;
  return SparseOperator(a.space_, SparseOperator::Matrix(s * a.m_), herm);
}

SparseOperator operator*(double s, const SparseOperator& a) {
  return SparseOperator(a.space_, SparseOperator::Matrix(cplx(s) * a.m_), a.hermitian_);
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

}  // namespace pb
