#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "physbench/sparse.hpp"

namespace pb::hubbard {

enum class Spin { up = 0, down = 1 };

// Sign convention for operators on different sites.
enum class SiteSigns { commuting, jordan_wigner };

// Four states per site; within a site the up occupation is the more
// significant digit. Site 0 is the most significant.
class FermiSpace {
 public:
  explicit FermiSpace(std::size_t n_sites, SiteSigns signs = SiteSigns::commuting);

  [[nodiscard]] std::size_t n_sites() const { return n_; }
  [[nodiscard]] SiteSigns signs() const { return signs_; }
  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] std::int64_t dim() const { return space_.dim(); }

  [[nodiscard]] SparseOperator annihilate(std::size_t site, Spin s) const;
  [[nodiscard]] SparseOperator create(std::size_t site, Spin s) const;
  [[nodiscard]] SparseOperator number(std::size_t site, Spin s) const;
  [[nodiscard]] SparseOperator identity() const { return SparseOperator::identity(space_); }

 private:
  std::size_t n_;
  SiteSigns signs_;
  HilbertSpace space_;
  std::vector<SparseOperator> annihilators_;  // index 2*site + spin
};

struct Bond {
  std::size_t i, j;
};

// Nearest-neighbour bonds of a chain; the closing bond is added for periodic chains of length > 2.
[[nodiscard]] std::vector<Bond> chain_bonds(std::size_t n_sites, bool periodic);

struct HubbardParams {
  double u = 0.0;
  double mu = 0.0;
  double t = 0.0;
};

// u sum n_up n_down - mu sum n + t sum_<ij>,s (a+_j a_i + h.c.)
[[nodiscard]] SparseOperator standard_hubbard(const HubbardParams& p, const FermiSpace& fs, bool periodic);

struct Triple {
  SparseOperator plus, minus, h;
};

struct Generators {
  Triple spin;    // magnetic su(2)
  Triple pseudo;  // pairing su(2)
  [[nodiscard]] std::map<std::string, const SparseOperator*> named() const;
};

// Site sums of the local generators.
[[nodiscard]] Generators symmetry_generators(const FermiSpace& fs);

// Largest |entry| of [H, G] for each generator.
[[nodiscard]] std::map<std::string, double> commutation_report(const SparseOperator& h, const Generators& g);
[[nodiscard]] double max_commutator(const std::map<std::string, double>& report);

// max |[X+,X-] - H|, |[H,X+] - 2X+|, |[H,X-] + 2X-|
[[nodiscard]] double su2_residual(const Triple& t);

struct HsymParams {
  double u = 0.0, mu = 0.0, t = 0.0, r = 0.0, s = 0.0, v = 0.0;
  cplx z = 0.0;
  // Edges per site. When unset it is taken from the geometry: 1 for a pair,
  // 2 for a ring, and the harmonic mean of the two site degrees on an open chain.
  std::optional<double> e;
};

[[nodiscard]] SparseOperator hsym_hamiltonian(const HsymParams& p, const FermiSpace& fs, bool periodic);
// v at which the symmetric model commutes with both su(2) actions for uniform e.
[[nodiscard]] double symmetric_v(const HsymParams& p, double e);

struct TwistReport {
  double q = 1.0;
  double alpha = 1.0;
  double beta = 0.0;
  double coproduct_plus = 0.0;   // |M Dc(X+) M* - Dq(X+)|
  double coproduct_minus = 0.0;
  double coproduct_h = 0.0;
  double mm_star_printed = 0.0;  // |M M* - (1 + (alpha^2 - 1) xi)|
  double mm_star_actual = 0.0;   // |M M* - (1 + (alpha^2 + beta^2 - 1) xi)|
  double xi_projector = 0.0;     // |xi^2 - xi|
  double xi_closed_form = 0.0;   // |xi - (H^2 x H^2 - H x H)/2|
  double coproduct_literal_sign = 0.0;  // coproduct residual with beta of the opposite sign
};

// Two-site pairing representation. beta is chosen with alpha - beta = q^{1/2}
// and M* is the real transpose.
[[nodiscard]] TwistReport twist_operator_check(double q);

// Unitary exchanging a_down and a_down^+ on every site.
[[nodiscard]] SparseOperator particle_hole_down(const FermiSpace& fs);

}  // namespace pb::hubbard
