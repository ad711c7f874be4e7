#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "physbench/core.hpp"

namespace pb {

// Half-integer spin stored as the integer 2s.
class SpinSite {
 public:
  static SpinSite from_spin(double s);
  static SpinSite from_twice(int twice_spin);

  [[nodiscard]] int twice() const { return twice_; }
  [[nodiscard]] double spin() const { return 0.5 * twice_; }
  [[nodiscard]] int dim() const { return twice_ + 1; }

  friend bool operator==(SpinSite, SpinSite) = default;

 private:
  explicit SpinSite(int twice) : twice_(twice) {}
  int twice_;
};

// Ordered tensor product of finite local spaces. Site 0 is the most
// significant digit of the product index (Kronecker order).
class HilbertSpace {
 public:
  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<int> local_dims);
  static HilbertSpace of_spins(std::span<const SpinSite> sites);
  static HilbertSpace uniform_spin(std::size_t n_sites, SpinSite site);

  [[nodiscard]] std::size_t n_sites() const { return dims_.size(); }
  [[nodiscard]] int local_dim(std::size_t site) const { return dims_.at(site); }
  [[nodiscard]] std::int64_t dim() const { return total_; }
  [[nodiscard]] std::int64_t stride(std::size_t site) const { return strides_.at(site); }
  [[nodiscard]] const std::vector<int>& local_dims() const { return dims_; }
  [[nodiscard]] int digit(std::int64_t index, std::size_t site) const {
    return static_cast<int>((index / strides_[site]) % dims_[site]);
  }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::int64_t> strides_;
  std::int64_t total_ = 1;
};

struct Entry {
  std::int64_t row;
  std::int64_t col;
  cplx value;
};

// Immutable complex sparse operator (CSR storage) on a HilbertSpace.
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t>;

  SparseOperator() = default;
  // Duplicate coordinates are summed. If `hermitian` is set the entries are
  // verified to be self-adjoint within 1e-13.
  SparseOperator(HilbertSpace space, std::span<const Entry> entries, bool hermitian);
  SparseOperator(HilbertSpace space, Matrix matrix, bool hermitian);

  static SparseOperator identity(const HilbertSpace& space);
  static SparseOperator zero(const HilbertSpace& space, bool hermitian = true);
  static SparseOperator from_dense(const HilbertSpace& space, const CMatrix& m, bool hermitian);

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] std::int64_t dim() const { return space_.dim(); }
  [[nodiscard]] bool is_hermitian() const { return hermitian_; }
  [[nodiscard]] std::int64_t nonzeros() const { return m_.nonZeros(); }

  [[nodiscard]] CVector apply(const CVector& v) const;
  [[nodiscard]] cplx expectation(const CVector& v) const;
  [[nodiscard]] CMatrix to_dense() const;
  [[nodiscard]] SparseOperator adjoint() const;
  [[nodiscard]] double max_abs_entry() const;
  // Largest absolute row sum, an upper bound on the spectral norm.
  [[nodiscard]] double norm_bound() const;
  // Re-derive the hermitian flag from the entries.
  [[nodiscard]] SparseOperator with_checked_hermitian_flag(double tol = 1e-13) const;

  // Record stream of (row:u64, col:u64, re:f64, im:f64), little-endian.
  void dump_binary(std::ostream& os) const;
  static SparseOperator load_binary(const HilbertSpace& space, std::istream& is, bool hermitian);

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(cplx s, const SparseOperator& a);
  friend SparseOperator operator*(double s, const SparseOperator& a);

 private:
  HilbertSpace space_;
  Matrix m_;
  bool hermitian_ = false;
};

[[nodiscard]] SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

}  // namespace pb
