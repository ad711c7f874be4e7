#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "physbench/elliptic.hpp"
#include "physbench/frustration.hpp"
#include "physbench/hubbard.hpp"
#include "physbench/laxflow.hpp"
#include "physbench/swmap.hpp"
#include "physbench/wehrl.hpp"
#include "poly_parse.hpp"
#include "scenario.hpp"

namespace pb::cli {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json vector_json(const RVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Json matrix_json(const RMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

double max_abs_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------- frustration

PreparedRun prepare_frustration(const Json& params) {
  ParamReader r(params, "params");
  const int lx = r.integer("Lx", std::nullopt, 1, 16);
  const int ly = r.integer("Ly", std::nullopt, 1, 16);
  const bool periodic = r.flag("periodic", true);
  const double s = r.number("s", 0.5);
  const bool fields_given = r.has("fields");
  std::vector<double> fields = r.numbers("fields", std::vector<double>{});
  const std::vector<double> betas = r.numbers("betas", std::vector<double>{});
  r.finish();

  if (s <= 0.0 || std::abs(2.0 * s - std::round(2.0 * s)) > 1e-12) r.reject("s", "must be a positive half-integer");
  frustration::GroundStateOptions opt;
  const double dim = std::pow(2.0 * s + 1.0, static_cast<double>(lx) * ly);
  if (dim > static_cast<double>(opt.dimension_cap)) {
    r.reject("Lx", "Hilbert space dimension " + num(dim) + " exceeds the cap " + std::to_string(opt.dimension_cap));
  }
  std::optional<frustration::Lattice> built;
  try {
    built = frustration::build_checkerboard(lx, ly, periodic, s);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("params: ") + e.what());
  }
  const frustration::Lattice lat = *built;
  if (!fields_given && periodic && dim <= 4096) fields = {-0.2, -0.1, 0.1, 0.2};
  if (!fields.empty() && !periodic) r.reject("fields", "the susceptibility bound needs a periodic lattice");
  if (!betas.empty()) {
    if (fields.empty()) r.reject("betas", "needs a non-empty field list");
    if (!periodic || lat.lattice.n_sites() > 8) r.reject("betas", "available for periodic lattices of at most 8 sites");
    for (double b : betas) {
      if (b <= 0.0) r.reject("betas", "inverse temperatures must be positive");
    }
  }

  return [lat, fields, betas, periodic, opt](std::uint64_t) {
    Outcome out;
    const auto h = frustration::checkerboard_hamiltonian(lat.lattice, lat.space);
    const auto rep = frustration::ground_state_report(h, lat.lattice, lat.space, opt);
    out.results["e0"] = rep.e0;
    out.results["degeneracy"] = rep.degeneracy;
    out.results["stot"] = rep.stot;
    out.results["ice_rule_max_abs"] = rep.ice_rule_max_abs();
    out.results["sites"] = lat.lattice.n_sites();
    out.results["boxes"] = lat.lattice.boxes().size();
    out.results["dimension"] = lat.space.dim();
    if (rep.sector_magnetization) out.results["sector_magnetization"] = *rep.sector_magnetization;
    out.below("max |<S_tot^2>| over ground block", max_abs_of(rep.stot), 1e-10);
    if (periodic) out.below("ice rule max |<S_box>|", rep.ice_rule_max_abs(), 1e-10);
    if (!fields.empty()) {
      const auto sus = frustration::susceptibility_check(lat.lattice, lat.space, fields, opt);
      out.results["fields"] = sus.fields;
      out.results["chi_bound_residuals"] = sus.bound_residuals;
      out.results["chi_estimate"] = sus.chi_estimate;
      out.results["chi_error"] = sus.chi_error;
      out.results["chi_local_estimate"] = sus.chi_local_estimate;
      out.results["chi_local_residuals"] = sus.local_residuals;
      out.at_least("min E(B) + (L/16) B^2 - E(0)",
                   *std::min_element(sus.bound_residuals.begin(), sus.bound_residuals.end()), -1e-9);
      out.at_most("chi", sus.chi_estimate, sus.chi_bound + 1e-6);
      out.at_most("chi_loc", sus.chi_local_estimate, sus.chi_local_bound + 1e-6);
    }
    if (!betas.empty()) {
      const auto th = frustration::thermal_check(lat.lattice, lat.space, betas, fields);
      out.results["thermal_min_residual"] = th.min_residual();
      out.at_least("min F(B) + (L/16) B^2 - F(0)", th.min_residual(), -1e-9);
    }
    return out;
  };
}

// ---------------------------------------------------------------- wehrl

std::vector<SpinSite> spins_from(ParamReader& r, const std::string& key) {
  std::vector<SpinSite> out;
  for (double j : r.numbers(key, std::nullopt)) {
    const double twice = 2.0 * j;
    if (std::abs(twice - std::round(twice)) > 1e-12 || twice < 1.0 || twice > 12.0) {
      r.reject(key, "spins must be half-integers in [1/2, 6]");
    }
    out.push_back(SpinSite::from_twice(static_cast<int>(std::lround(twice))));
  }
  if (out.empty()) r.reject(key, "needs at least one spin");
  return out;
}

PreparedRun prepare_wehrl(const Json& params) {
  ParamReader r(params, "params");
  const std::string mode = r.text("mode", std::nullopt, {"coherent", "random", "scan"});
  const auto spins = spins_from(r, "j");
  double theta = 0.0, phi = 0.0;
  int count = 0, quad = 0, quad_power = 0;
  wehrl::ScanOptions scan;
  if (mode == "coherent") {
    if (spins.size() != 1) r.reject("j", "coherent mode takes a single spin");
    theta = r.number("theta", 0.7);
    phi = r.number("phi", 1.1);
  }
  if (mode == "random") count = r.integer("count", 20, 1, 10000);
  if (mode != "scan") {
    quad = r.integer("quadrature", 128, 8, 1024);
    quad_power = r.integer("power_quadrature", 64, 8, 1024);
  } else {
    scan.n_samples = r.integer("restarts", scan.n_samples, 1, 1000);
    scan.optimizer_steps = r.integer("steps", scan.optimizer_steps, 1, 100000);
  }
  r.finish();

  const std::vector<std::string> header{"j", "points", "S_W_formula", "S_W_quadrature", "norm_power_s2"};
  return [=](std::uint64_t seed) {
    Outcome out;
    if (mode == "scan") {
      Json rows = Json::array();
      double min_gap = std::numeric_limits<double>::infinity();
      out.csv.push_back({"j", "min_entropy", "coherent_value"});
      for (const auto& j : spins) {
        wehrl::ScanOptions o = scan;
        o.seed = seed;
        const auto rep = wehrl::lieb_conjecture_scan(j, o);
        Json pts = Json::array();
        for (const auto& p : rep.argmin_points) pts.push_back(Json::array({p.theta, p.phi}));
        rows.push_back({{"j", j.spin()},
                        {"min_entropy", rep.min_entropy},
                        {"coherent_value", rep.coherent_value},
                        {"argmin_points", pts}});
        min_gap = std::min(min_gap, rep.min_entropy - rep.coherent_value);
        out.csv.push_back({num(j.spin()), num(rep.min_entropy), num(rep.coherent_value)});
        out.at_least("scan minimum minus coherent value, j=" + num(j.spin()), rep.min_entropy - rep.coherent_value,
                     -1e-7);
      }
      out.results["scan"] = rows;
      out.results["min_gap"] = min_gap;
      return out;
    }

    const wehrl::SphereQuadrature fine(quad), medium(quad_power);
    out.csv.push_back(header);
    const auto row = [&](const wehrl::SpinState& st, double formula, double quadrature, double np2) {
      out.csv.push_back({num(st.j()), std::to_string(fine.size()), num(formula), num(quadrature), num(np2)});
    };
    if (mode == "coherent") {
      const auto st = wehrl::coherent_state(spins.front(), theta, phi);
      const double formula = wehrl::wehrl_entropy_formula(st);
      const double quadrature = wehrl::wehrl_entropy_quadrature(st, fine);
      const double np2 = wehrl::norm_power_check(st, 2, medium);
      const double coherent = 2.0 * st.j() / (2.0 * st.j() + 1.0);
      row(st, formula, quadrature, np2);
      out.results["S_W"] = formula;
      out.results["S_W_quadrature"] = quadrature;
      out.results["coherent_value"] = coherent;
      out.results["norm_power_s2"] = np2;
      out.below("|S_W - 2j/(2j+1)|", std::abs(formula - coherent), 1e-9);
      out.below("formula vs quadrature", std::abs(formula - quadrature), 1e-7);
      out.at_most("norm power s=2", np2, 1.0 + 1e-9);
      return out;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double gap = 0.0, power = 0.0, lieb = std::numeric_limits<double>::infinity();
    Json per_spin = Json::array();
    for (const auto& j : spins) {
      double j_gap = 0.0, j_power = 0.0, j_min = std::numeric_limits<double>::infinity();
      const double coherent = 2.0 * j.spin() / (2.0 * j.spin() + 1.0);
      for (int k = 0; k < count; ++k) {
        CVector amp(j.dim());
        for (auto& z : amp) z = cplx(normal(rng), normal(rng));
        const wehrl::SpinState st(j, amp / amp.norm());
        const double formula = wehrl::wehrl_entropy_formula(st);
        const double quadrature = wehrl::wehrl_entropy_quadrature(st, fine);
        const double np2 = wehrl::norm_power_check(st, 2, medium);
        const double np3 = wehrl::norm_power_check(st, 3, medium);
        row(st, formula, quadrature, np2);
        j_gap = std::max(j_gap, std::abs(formula - quadrature));
        j_power = std::max({j_power, np2, np3});
        j_min = std::min(j_min, formula);
      }
      per_spin.push_back({{"j", j.spin()},
                          {"max_formula_quadrature_gap", j_gap},
                          {"max_norm_power", j_power},
                          {"min_entropy", j_min},
                          {"coherent_value", coherent}});
      gap = std::max(gap, j_gap);
      power = std::max(power, j_power);
      lieb = std::min(lieb, j_min - coherent);
    }
    out.results["per_spin"] = per_spin;
    out.results["max_formula_quadrature_gap"] = gap;
    out.results["max_norm_power"] = power;
    out.results["min_entropy_minus_coherent"] = lieb;
    out.below("formula vs quadrature", gap, 1e-7);
    out.at_most("norm power s in {2,3}", power, 1.0 + 1e-9);
    out.at_least("entropy minus coherent value", lieb, -1e-9);
    return out;
  };
}

// ---------------------------------------------------------------- hubbard

PreparedRun prepare_hubbard(const Json& params) {
  ParamReader r(params, "params");
  const int sites = r.integer("sites", std::nullopt, 2, 5);
  const bool periodic = r.flag("periodic", false);
  const hubbard::HubbardParams base{.u = r.number("u", 2.0), .mu = r.number("mu", 1.0), .t = r.number("t", 0.7)};
  std::optional<hubbard::HsymParams> hsym;
  if (r.has("hsym")) {
    ParamReader h(r.raw("hsym"), "params.hsym");
    hubbard::HsymParams p;
    p.u = base.u;
    p.mu = base.mu;
    p.t = base.t;
    p.r = h.number("r", 0.0);
    p.s = h.number("s", 0.0);
    p.z = h.complex("z", 0.0);
    if (h.has("e")) {
      p.e = h.number("e");
      if (*p.e <= 0.0) h.reject("e", "must be positive");
    }
    const bool uniform = sites == 2 || (periodic && sites >= 3);
    const double e = p.e.value_or(uniform ? (sites == 2 ? 1.0 : 2.0) : 1.0);
    p.v = h.has("v") ? h.number("v") : hubbard::symmetric_v(p, e);
    h.finish();
    hsym = p;
  }
  const std::vector<double> qs = r.numbers("twist_q", std::vector<double>{});
  for (double q : qs) {
    if (q <= 0.0) r.reject("twist_q", "deformation parameters must be positive");
  }
  r.finish();

  return [=](std::uint64_t) {
    Outcome out;
    const hubbard::FermiSpace fs(static_cast<std::size_t>(sites));
    const auto g = hubbard::symmetry_generators(fs);
    const auto std_report = hubbard::commutation_report(hubbard::standard_hubbard(base, fs, periodic), g);
    const bool half_filling = std::abs(base.mu - 0.5 * base.u) <= 1e-15 * std::max(1.0, std::abs(base.u));
    Json norms = Json::object();
    double spin_max = 0.0;
    for (const auto& [name, value] : std_report) {
      norms[name] = value;
      if (name.starts_with("spin")) spin_max = std::max(spin_max, value);
    }
    out.results["commutator_norms"] = norms;
    out.results["max_commutator"] = hubbard::max_commutator(std_report);
    out.results["half_filling"] = half_filling;
    out.below("spin generators commute", spin_max, 1e-12);
    if (half_filling) out.below("all generators commute at mu = u/2", hubbard::max_commutator(std_report), 1e-12);

    if (hsym) {
      const auto rep = hubbard::commutation_report(hubbard::hsym_hamiltonian(*hsym, fs, periodic), g);
      Json hn = Json::object();
      for (const auto& [name, value] : rep) hn[name] = value;
      const double c = hubbard::max_commutator(rep);
      const bool uniform = sites == 2 || (periodic && sites >= 3);
      const double e = hsym->e.value_or(sites == 2 ? 1.0 : 2.0);
      Json hj{{"commutator_norms", hn}, {"max_commutator", c}, {"v", hsym->v}};
      if (uniform) {
        const double target = hubbard::symmetric_v(*hsym, e);
        const bool condition = std::abs(hsym->v - target) <= 1e-12 * std::max(1.0, std::abs(target));
        hj["symmetric_v"] = target;
        hj["condition_satisfied"] = condition;
        out.results["condition_satisfied"] = condition;
        if (condition) {
          out.below("H_sym commutes when the condition holds", c, 1e-10);
        } else {
          out.at_least("H_sym fails to commute off the condition", c, 1e-10);
        }
      }
      out.results["hsym"] = hj;
    }

    if (!qs.empty()) {
      Json tw = Json::array();
      for (double q : qs) {
        const auto t = hubbard::twist_operator_check(q);
        tw.push_back({{"q", q},
                      {"alpha", t.alpha},
                      {"beta", t.beta},
                      {"coproduct_plus", t.coproduct_plus},
                      {"coproduct_minus", t.coproduct_minus},
                      {"coproduct_h", t.coproduct_h},
                      {"mm_star_printed_form", t.mm_star_printed},
                      {"mm_star", t.mm_star_actual},
                      {"xi_projector", t.xi_projector}});
        const std::string tag = " q=" + num(q);
        out.below("twist coproduct X+" + tag, t.coproduct_plus, 1e-12);
        out.below("twist coproduct X-" + tag, t.coproduct_minus, 1e-12);
        out.below("twist coproduct H" + tag, t.coproduct_h, 1e-12);
        out.below("M M* - (1 + (alpha^2 + beta^2 - 1) xi)" + tag, t.mm_star_actual, 1e-12);
      }
      out.results["twist"] = tw;
    }
    return out;
  };
}

// ---------------------------------------------------------------- laxflow

PreparedRun prepare_laxflow(const Json& params) {
  ParamReader r(params, "params");
  const int n = r.integer("n", 3, 2, 8);
  const int power = r.integer("power", 2, 1, 6);
  const double t_max = r.number("t_max", 1.0);
  const int steps = r.integer("steps", 10, 1, 1000);
  const double scale = r.number("scale", 0.3);
  std::optional<RMatrix> l0;
  if (r.has("l0")) {
    const Json& m = r.raw("l0");
    if (!m.is_array() || m.size() != static_cast<std::size_t>(n)) r.reject("l0", "expected n rows");
    RMatrix out(n, n);
    for (int i = 0; i < n; ++i) {
      if (!m[i].is_array() || m[i].size() != static_cast<std::size_t>(n)) r.reject("l0", "expected n x n numbers");
      for (int j = 0; j < n; ++j) {
        if (!m[i][j].is_number()) r.reject("l0", "expected numbers");
        out(i, j) = m[i][j].get<double>();
      }
    }
    l0 = out;
  }
  std::string twist_type = "identity";
  std::vector<double> twist_values;
  if (r.has("twist")) {
    ParamReader t(r.raw("twist"), "params.twist");
    twist_type = t.text("type", std::nullopt, {"identity", "diagonal", "permutation"});
    if (twist_type != "identity") twist_values = t.numbers("values", std::nullopt);
    t.finish();
    if (twist_type != "identity" && twist_values.size() != static_cast<std::size_t>(n)) {
      r.reject("twist", "values must have n entries");
    }
  }
  r.finish();
  if (t_max <= 0.0) r.reject("t_max", "must be positive");
  if (scale < 0.0) r.reject("scale", "must be non-negative");

  std::optional<laxflow::Twist> twist_built;
  try {
    if (twist_type == "identity") {
      twist_built = laxflow::Twist::identity(n);
    } else if (twist_type == "diagonal") {
      twist_built = laxflow::Twist::diagonal(Eigen::Map<const RVector>(twist_values.data(), n));
    } else {
      std::vector<int> perm;
      for (double v : twist_values) {
        if (v != std::round(v)) throw DomainError("permutation entries must be integers");
        perm.push_back(static_cast<int>(v));
      }
      twist_built = laxflow::Twist::permutation(perm);
    }
  } catch (const std::exception& e) {
    throw ValidationError(std::string("params.twist: ") + e.what());
  }
  const laxflow::Twist twist = *twist_built;
  const bool untwisted = twist_type == "identity";

  return [=](std::uint64_t seed) {
    Outcome out;
    std::vector<double> times;
    for (int k = 1; k <= steps; ++k) times.push_back(t_max * k / steps);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    int redraws = 0;
    RMatrix start;
    laxflow::LaxTrajectory tr;
    std::optional<laxflow::LaxSystem> sys;
    for (;;) {
      if (l0) {
        start = *l0;
      } else {
        start = RMatrix::Identity(n, n);
        for (Eigen::Index k = 0; k < start.size(); ++k) start.data()[k] += scale * normal(rng);
      }
      try {
        sys = laxflow::make_system(start, power, twist);
        tr = laxflow::lax_solve_by_factorization(*sys, times);
        break;
      } catch (const DomainError&) {
        if (l0 || ++redraws > 100) throw;
      }
    }
    double ode = 0.0, drift = 0.0, invariant = 0.0;
    Json spectra = Json::array();
    const double h0 = sys->hamiltonian.value(start, twist);
    for (std::size_t i = 0; i < times.size(); ++i) {
      ode = std::max(ode, (tr.states[i] - laxflow::lax_ode_reference(*sys, times[i])).cwiseAbs().maxCoeff());
      drift = std::max(drift, laxflow::spectrum_distance(tr.states[i], start));
      invariant = std::max(invariant, std::abs(sys->hamiltonian.value(tr.states[i], twist) - h0));
      spectra.push_back(vector_json(laxflow::sorted_real_spectrum(tr.states[i])));
    }
    out.results["t"] = times;
    out.results["spectrum"] = spectra;
    out.results["l0"] = matrix_json(start);
    out.results["redraws"] = redraws;
    out.results["residual_vs_ode"] = ode;
    out.results["spectrum_drift"] = drift;
    out.results["invariant_drift"] = invariant;
    out.results["branch_gap"] = tr.branch_gap;
    out.below("factorization vs RK4", ode, 1e-6);
    out.below("twisted invariant drift", invariant, 1e-9);
    if (untwisted) {
      out.below("spectrum drift", drift, 1e-8);
      out.below("branch gap", tr.branch_gap, 1e-9);
    }
    return out;
  };
}

// ---------------------------------------------------------------- elliptic

PreparedRun prepare_elliptic(const Json& params) {
  ParamReader r(params, "params");
  elliptic::EllipticParams p;
  p.rank = r.integer("rank", 2, 2, 4);
  p.tau = r.complex("tau", p.tau);
  p.eta = r.complex("eta", p.eta);
  p.c = r.complex("c", p.c);
  const int points = r.integer("points", 20, 1, 1000);
  const bool with_rll = r.flag("rll", p.rank == 2);
  const int window = r.integer("window", 2, 1, 6);
  r.finish();
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ValidationError(std::string("params: ") + e.what());
  }
  if (std::abs(p.eta) < 1e-6) r.reject("eta", "must be non-zero");

  return [=](std::uint64_t seed) {
    Outcome out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const auto spectral = [&] {
      for (;;) {
        const cplx z(0.3 * normal(rng), 0.05 * normal(rng));
        if (std::abs(z) > 0.05) return z;
      }
    };
    const auto weights = [&] {
      for (;;) {
        std::vector<cplx> lam(static_cast<std::size_t>(p.rank));
        for (auto& x : lam) x = cplx(0.5 * normal(rng), 0.1 * normal(rng));
        bool ok = true;
        for (std::size_t i = 0; i < lam.size(); ++i) {
          for (std::size_t j = i + 1; j < lam.size(); ++j) ok = ok && std::abs(lam[i] - lam[j]) > 0.3;
        }
        if (ok) return lam;
      }
    };
    double dybe = 0.0, rll = 0.0;
    for (int k = 0; k < points; ++k) dybe = std::max(dybe, elliptic::dybe_residual(weights(), spectral(), spectral(), p));
    out.results["dybe_max_residual"] = dybe;
    out.below("DYBE residual", dybe, 1e-9);
    if (with_rll) {
      for (int k = 0; k < points; ++k) rll = std::max(rll, elliptic::rll_residual(weights(), weights(), spectral(), spectral(), p));
      out.results["rll_max_residual"] = rll;
      out.below("RLL residual", rll, 1e-9);
    }
    const cplx u(0.23, 0.11);
    const double quasi = std::max({std::abs(elliptic::theta(u + 1.0, p.tau) + elliptic::theta(u, p.tau)),
                                   std::abs(elliptic::theta(u + p.tau, p.tau) +
                                            std::exp(-kI * kPi * (p.tau + 2.0 * u)) * elliptic::theta(u, p.tau)),
                                   std::abs(elliptic::theta(-u, p.tau) + elliptic::theta(u, p.tau))});
    out.results["theta_quasi_periodicity"] = quasi;
    out.below("theta quasi-periodicity", quasi, 1e-12);
    out.results["params"] = {{"rank", p.rank}, {"tau", complex_json(p.tau)}, {"eta", complex_json(p.eta)},
                             {"c", complex_json(p.c)}};

    // Difference operator applied to a random wavefunction on a window.
    const auto base_vec = weights();
    CVector base(p.rank);
    for (int k = 0; k < p.rank; ++k) base(k) = base_vec[static_cast<std::size_t>(k)];
    elliptic::LatticeWavefunction psi(base, std::vector<int>(static_cast<std::size_t>(p.rank - 1), -window),
                                      std::vector<int>(static_cast<std::size_t>(p.rank - 1), window));
    for (std::size_t idx = 0; idx < psi.size(); ++idx) psi.set(psi.coords(idx), cplx(normal(rng), normal(rng)));
    const auto applied = elliptic::ruijsenaars_apply(psi, p);
    std::vector<std::string> header;
    for (int k = 1; k < p.rank; ++k) header.push_back("m" + std::to_string(k));
    for (const char* h : {"psi_re", "psi_im", "hpsi_re", "hpsi_im"}) header.emplace_back(h);
    out.csv.push_back(header);
    std::size_t valid = 0;
    for (std::size_t idx = 0; idx < applied.size(); ++idx) {
      if (!applied.valid(idx)) continue;
      ++valid;
      std::vector<std::string> row;
      for (int m : applied.coords(idx)) row.push_back(std::to_string(m));
      const cplx in = psi.value(idx), hv = applied.value(idx);
      for (double x : {in.real(), in.imag(), hv.real(), hv.imag()}) row.push_back(num(x));
      out.csv.push_back(row);
    }
    out.results["hpsi_samples"] = valid;
    return out;
  };
}

// ---------------------------------------------------------------- swmap

std::vector<poly::RPoly> polys_from(ParamReader& r, const std::string& key, std::size_t dim, std::size_t count) {
  const auto texts = r.strings(key);
  if (count != 0 && texts.size() != count) r.reject(key, "expected " + std::to_string(count) + " polynomials");
  std::vector<poly::RPoly> out;
  for (const auto& t : texts) {
    try {
      out.push_back(parse_polynomial(t, dim));
    } catch (const ExpressionError& e) {
      r.reject(key, e.what());
    }
  }
  return out;
}

PreparedRun prepare_swmap(const Json& params) {
  using swmap::RField;
  ParamReader r(params, "params");
  const auto dim = static_cast<std::size_t>(r.integer("dim", 2, 2, 4));
  const auto theta_p = polys_from(r, "theta_polys", dim, dim * (dim - 1) / 2);
  const auto a_p = polys_from(r, "a_polys", dim, dim);
  const auto lambda_p = polys_from(r, "lambda_polys", dim, 0);
  if (lambda_p.empty() || lambda_p.size() > 2) r.reject("lambda_polys", "expected one or two gauge parameters");
  std::vector<int> orders;
  for (double o : r.numbers("orders", std::vector<double>{0, 1, 2})) {
    if (o != std::round(o) || o < 0 || o > 8) r.reject("orders", "orders must be integers in [0, 8]");
    orders.push_back(static_cast<int>(o));
  }
  std::vector<RVector> samples;
  if (r.has("samples")) {
    const Json& s = r.raw("samples");
    if (!s.is_array() || s.empty()) r.reject("samples", "expected a non-empty list of points");
    for (const auto& pt : s) {
      if (!pt.is_array() || pt.size() != dim) r.reject("samples", "each point needs dim coordinates");
      RVector x(static_cast<Eigen::Index>(dim));
      for (std::size_t k = 0; k < dim; ++k) {
        if (!pt[k].is_number()) r.reject("samples", "coordinates must be numbers");
        x(static_cast<Eigen::Index>(k)) = pt[k].get<double>();
      }
      samples.push_back(x);
    }
  }
  r.finish();

  const RField theta = RField::bivector(dim, theta_p);
  const RField a = RField::vector(dim, a_p);
  if (samples.empty()) {
    std::mt19937_64 fixed(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 3; ++k) {
      RVector x(static_cast<Eigen::Index>(dim));
      for (auto& c : x) c = u(fixed);
      samples.push_back(x);
    }
  }
  const auto theta_d = theta.to_double();
  for (const auto& x : samples) {
    const std::span<const double> xs(x.data(), dim);
    if (dim > 2 && swmap::schouten_residual([&](std::span<const double> p) { return theta_d.evaluate_matrix(p); }, xs) >
                       1e-8) {
      r.reject("theta_polys", "bivector is not Poisson at the sample points");
    }
    const RMatrix th = theta_d.evaluate_matrix(xs);
    const RMatrix f = poly::field_strength(a).to_double().evaluate_matrix(xs);
    const double det = (RMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) + f * th)
                           .determinant();
    if (std::abs(det) < 1e-6) r.reject("a_polys", "1 + f theta is singular at a sample point");
  }

  return [=](std::uint64_t) {
    Outcome out;
    const auto& lambda = lambda_p.front();
    const double push = swmap::pushforward_residual(theta, a, samples);
    out.results["pushforward_residual"] = push;
    out.below("pushforward residual", push, 1e-5);

    const swmap::MoserFlow flow(theta, a);
    if (theta.is_constant() && poly::field_strength(a).is_constant()) {
      double worst = 0.0;
      for (const auto& x : samples) {
        const std::span<const double> xs(x.data(), dim);
        const RMatrix th = flow.theta().evaluate_matrix(xs);
        const RMatrix f = flow.field_strength().evaluate_matrix(xs);
        const auto d = static_cast<Eigen::Index>(dim);
        const RMatrix expected = th * (RMatrix::Identity(d, d) + f * th).inverse();
        const RMatrix jac = flow.jacobian(x);
        worst = std::max(worst, (jac * th * jac.transpose() - expected).cwiseAbs().maxCoeff());
      }
      out.results["constant_case_residual"] = worst;
      out.below("constant case theta (1 + f theta)^-1", worst, 1e-9);
    }

    const auto fit = swmap::gauge_covariance_scaling(theta, a, lambda, samples);
    out.results["gauge_covariance"] = {{"eps", fit.eps}, {"residuals", fit.residuals}};
    out.results["gauge_exponent"] = std::isfinite(fit.exponent) ? Json(fit.exponent) : Json("inf");
    out.at_least("gauge covariance exponent", fit.exponent, 1.9);

    Json series = Json::object(), gaps = Json::object();
    for (int o : orders) {
      const auto lt = swmap::lambda_tilde(theta, a, lambda, o);
      series[std::to_string(o)] = lt.to_string();
      const auto ltd = lt.to_double();
      double gap = 0.0;
      for (const auto& x : samples) {
        gap = std::max(gap, std::abs(ltd.evaluate(std::span<const double>(x.data(), dim)) -
                                     swmap::lambda_tilde_exact(flow, lambda, x, 256)));
      }
      gaps[std::to_string(o)] = gap;
    }
    out.results["lambda_tilde"] = series;
    out.results["lambda_tilde_vs_exact"] = gaps;
    const bool exact = swmap::lambda_tilde(theta, a, lambda, 2) ==
                       swmap::lambda_tilde_second_order_closed_form(theta, a, lambda);
    out.results["second_order_closed_form_exact"] = exact;
    out.equal("order-2 gauge parameter identity exact", exact ? 1.0 : 0.0, 1.0);

    if (lambda_p.size() == 2) {
      Json rows = Json::array();
      for (int o : orders) {
        const auto c = swmap::semiclassical_consistency(theta, a, lambda_p[0], lambda_p[1], o, samples);
        rows.push_back({{"order", o}, {"lowest_field_degree", c.lowest_field_degree}, {"sample_norm", c.sample_norm}});
      }
      out.results["consistency"] = rows;
    }
    return out;
  };
}

}  // namespace

const std::vector<ModuleEntry>& modules() {
  static const std::vector<ModuleEntry> all{
      {"frustration", prepare_frustration,
       {"e0", "degeneracy", "ice_rule_max_abs", "dimension", "chi_estimate", "chi_local_estimate",
        "thermal_min_residual"}},
      {"wehrl", prepare_wehrl,
       {"S_W", "S_W_quadrature", "coherent_value", "norm_power_s2", "max_formula_quadrature_gap", "max_norm_power",
        "min_entropy_minus_coherent", "min_gap"}},
      {"hubbard", prepare_hubbard, {"max_commutator", "half_filling", "condition_satisfied"}},
      {"laxflow", prepare_laxflow, {"residual_vs_ode", "spectrum_drift", "invariant_drift", "branch_gap", "redraws"}},
      {"elliptic", prepare_elliptic, {"dybe_max_residual", "rll_max_residual", "theta_quasi_periodicity"}},
      {"swmap", prepare_swmap,
       {"pushforward_residual", "constant_case_residual", "gauge_exponent", "second_order_closed_form_exact"}},
  };
  return all;
}

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> v;
    const auto add = [&](std::string name, std::string module, Json params, Json expect = Json::object()) {
      Scenario s;
      s.name = std::move(name);
      s.module = std::move(module);
      s.seed = 1;
      s.params = std::move(params);
      s.expect = std::move(expect);
      v.push_back(std::move(s));
    };
    add("checkerboard-single-box", "frustration", {{"Lx", 2}, {"Ly", 2}, {"periodic", false}, {"s", 0.5}},
        {{"degeneracy", 2}});
    add("checkerboard-2x2", "frustration", {{"Lx", 2}, {"Ly", 2}, {"periodic", true}, {"s", 0.5}}, {{"degeneracy", 2}});
    add("checkerboard-2x2-spin1", "frustration", {{"Lx", 2}, {"Ly", 2}, {"periodic", true}, {"s", 1.0}},
        {{"degeneracy", 3}});
    add("checkerboard-2x4", "frustration",
        {{"Lx", 2}, {"Ly", 4}, {"periodic", true}, {"s", 0.5}, {"fields", {-0.2, -0.1, 0.1, 0.2}},
         {"betas", {0.5, 1.0, 2.0}}});
    add("wehrl-coherent-spin1", "wehrl", {{"mode", "coherent"}, {"j", 1.0}},
        {{"S_W", {{"value", 2.0 / 3.0}, {"tol", 1e-8}}}});
    add("wehrl-random-states", "wehrl", {{"mode", "random"}, {"j", {1.0, 1.5, 2.0}}, {"count", 20}});
    add("wehrl-spin2-scan", "wehrl", {{"mode", "scan"}, {"j", 2.0}});
    add("hubbard-chain3", "hubbard", {{"sites", 3}, {"u", 2.0}, {"mu", 1.0}, {"t", 0.7}},
        {{"max_commutator", {{"value", 0.0}, {"tol", 1e-12}}}});
    add("hubbard-hsym-pair", "hubbard",
        {{"sites", 2}, {"u", 0.8}, {"mu", 0.3}, {"t", 0.5}, {"hsym", {{"r", 0.4}, {"s", -0.2}, {"z", {0.3, 0.1}}}}},
        {{"condition_satisfied", true}});
    add("hubbard-twist", "hubbard", {{"sites", 2}, {"twist_q", {0.5, 1.0, 2.0}}});
    add("lax-toda-3x3", "laxflow", {{"n", 3}, {"power", 2}});
    add("lax-twisted-3x3", "laxflow", {{"n", 3}, {"power", 2}, {"twist", {{"type", "diagonal"}, {"values", {1.2, 0.8, 1.1}}}}});
    add("elliptic-rank2", "elliptic", {{"rank", 2}});
    add("elliptic-rank3", "elliptic", {{"rank", 3}});
    add("sw-constant-plane", "swmap",
        {{"dim", 2}, {"theta_polys", {"1/2"}}, {"a_polys", {"-3/10*y", "3/10*x"}}, {"lambda_polys", {"x/3"}}});
    add("sw-polynomial-plane", "swmap",
        {{"dim", 2},
         {"theta_polys", {"1 + x^2/4 + x*y/5"}},
         {"a_polys", {"y/3 + x*y/4", "-x/5 + x^2/6"}},
         {"lambda_polys", {"x*y/3 + y^2/5 + x/7", "x/2 + y^2/3"}},
         {"orders", {0, 1, 2, 3}},
         {"samples", {{0.3, -0.2}, {-0.5, 0.4}, {0.1, 0.7}}}},
        {{"second_order_closed_form_exact", true}});
    return v;
  }();
  return all;
}

}  // namespace pb::cli
