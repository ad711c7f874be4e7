#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "physbench/eigensolve.hpp"
#include "physbench/sparse.hpp"

namespace pb::frustration {

using Box = std::array<std::size_t, 4>;

struct Bond {
  std::size_t i, j;
};

// Mirror that exchanges the two halves of the lattice. `left` and `right`
// list sites so that right[k] is the mirror image of left[k].
struct ReflectionSplit {
  enum class Direction { y, x };
  Direction direction = Direction::y;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

class CheckerboardLattice {
 public:
  CheckerboardLattice(int lx, int ly, bool periodic_x, bool periodic_y);

  [[nodiscard]] int lx() const { return lx_; }
  [[nodiscard]] int ly() const { return ly_; }
  [[nodiscard]] bool periodic_x() const { return px_; }
  [[nodiscard]] bool periodic_y() const { return py_; }
  [[nodiscard]] bool fully_periodic() const { return px_ && py_; }
  [[nodiscard]] std::size_t n_sites() const { return static_cast<std::size_t>(lx_) * ly_; }
  [[nodiscard]] std::size_t site(int x, int y) const { return static_cast<std::size_t>(y) * lx_ + x; }
  [[nodiscard]] const std::vector<Box>& boxes() const { return boxes_; }
  // Six pairs per box, with multiplicity when boxes coincide.
  [[nodiscard]] const std::vector<Bond>& bonds() const { return bonds_; }
  [[nodiscard]] const std::optional<ReflectionSplit>& reflection() const { return reflection_; }

 private:
  int lx_, ly_;
  bool px_, py_;
  std::vector<Box> boxes_;
  std::vector<Bond> bonds_;
  std::optional<ReflectionSplit> reflection_;
};

struct Lattice {
  CheckerboardLattice lattice;
  HilbertSpace space;
};

[[nodiscard]] Lattice build_checkerboard(int lx, int ly, bool periodic, double spin);
[[nodiscard]] Lattice build_checkerboard(int lx, int ly, bool periodic_x, bool periodic_y, double spin);

// Per-box field values; homogeneous(B) sets every box to B/2.
class BoxFields {
 public:
  static BoxFields per_box(std::vector<double> values) { return BoxFields(std::move(values)); }
  static BoxFields homogeneous(double b, std::size_t n_boxes) { return BoxFields(std::vector<double>(n_boxes, 0.5 * b)); }
  static BoxFields single_box(std::size_t box, double b, std::size_t n_boxes);
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

 private:
  explicit BoxFields(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

// 1/2 sum_x (S_x)^2, with the third component replaced by (S^3_x - b_x)^2 when fields are given.
[[nodiscard]] SparseOperator checkerboard_hamiltonian(const CheckerboardLattice& lat, const HilbertSpace& space,
                                                      const std::optional<BoxFields>& fields = std::nullopt);

struct GroundStateReport {
  double e0 = 0.0;
  Eigen::Index degeneracy = 0;
  std::vector<double> stot;              // <S_tot^2> per ground vector
  std::vector<std::vector<double>> box_s3;  // [vector][box]
  std::vector<std::vector<double>> box_s1;
  CMatrix ground_vectors;
  // Set when the solve ran in a fixed S3_tot sector. Ground vectors are then
  // the sector members of each multiplet and degeneracy counts full multiplets.
  std::optional<double> sector_magnetization;
  double ice_rule_max_abs() const;
};

struct GroundStateOptions {
  std::int64_t dimension_cap = 65536;
  // Above this dimension the ground block is found in the sector of smallest |S3_tot|.
  std::int64_t sector_threshold = 512;
  EigenOptions eigen{};
};

[[nodiscard]] GroundStateReport ground_state_report(const SparseOperator& h, const CheckerboardLattice& lat,
                                                    const HilbertSpace& space, const GroundStateOptions& opt = {});

// Coefficient matrix of a state with respect to the reflection split. Rows
// index the left product basis, columns the mirrored right basis (rotated by
// pi about y when `rotated`).
struct CoeffMatrix {
  CMatrix c;
  bool rotated = true;
};

[[nodiscard]] CoeffMatrix coefficient_matrix(const CVector& state, const CheckerboardLattice& lat,
                                             const HilbertSpace& space, bool rotated = true);
[[nodiscard]] CVector state_from_coefficients(const CoeffMatrix& cm, const CheckerboardLattice& lat,
                                              const HilbertSpace& space);
// Normalized state whose coefficient matrix is proportional to the identity.
[[nodiscard]] CVector canonical_state(const CheckerboardLattice& lat, const HilbertSpace& space);

struct PositivityReport {
  double energy_input = 0.0;    // E(c) for the symmetrized input
  double energy_upgraded = 0.0; // E(c_L), c_L = sqrt(c c^+)
  bool symmetric_part_used = true;
  CVector upgraded_state;
};

[[nodiscard]] PositivityReport positivity_upgrade(const CVector& state, const SparseOperator& h,
                                                  const CheckerboardLattice& lat, const HilbertSpace& space);

// Overlap with the normalized canonical state: tr(c)/sqrt(dim).
[[nodiscard]] cplx canonical_spin_zero_overlap(const CVector& state, const CheckerboardLattice& lat,
                                               const HilbertSpace& space);

struct SusceptibilityReport {
  std::vector<double> fields;
  std::vector<double> zeeman_energy;   // ground energy of H(0) - B S3_tot
  std::vector<double> bound_residuals; // E(B) + (Lambda/16) B^2 - E(0)
  double chi_estimate = 0.0;
  double chi_error = 0.0;
  double chi_bound = 0.125;
  std::vector<double> local_residuals;  // single-box analogue
  double chi_local_estimate = 0.0;
  double chi_local_error = 0.0;
  double chi_local_bound = 0.25;
};

[[nodiscard]] SusceptibilityReport susceptibility_check(const CheckerboardLattice& lat, const HilbertSpace& space,
                                                        const std::vector<double>& samples,
                                                        const GroundStateOptions& opt = {});

// Second derivative at zero from f(+-h) and f(0) on the step ladder, with
// two Richardson passes. Returns (estimate, error estimate).
[[nodiscard]] std::pair<double, double> richardson_second_derivative(const std::function<double(double)>& f,
                                                                      const std::vector<double>& steps);

struct ThermalReport {
  std::vector<double> betas;
  std::vector<double> fields;
  std::vector<std::vector<double>> residuals;  // [beta][field]: F(B) + (Lambda/16)B^2 - F(0)
  std::vector<double> zero_field_magnetization;
  double min_residual() const;
};

// Full-spectrum free-energy inequality; limited to at most 8 sites.
[[nodiscard]] ThermalReport thermal_check(const CheckerboardLattice& lat, const HilbertSpace& space,
                                          const std::vector<double>& betas, const std::vector<double>& fields);

}  // namespace pb::frustration
