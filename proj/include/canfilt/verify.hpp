#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "canfilt/adapt.hpp"
#include "canfilt/canonical.hpp"
#include "canfilt/errors.hpp"
#include "canfilt/metrics.hpp"
#include "canfilt/rng.hpp"
#include "canfilt/sim.hpp"
#include "canfilt/symmat.hpp"

// Numerical property checks.  Every check compares the production path
// against an independent route (grid search vs eigenvalue clipping,
// difference quotients vs the sensitivity recurrence, series exponentials vs
// Euler propagation), so agreement is evidence rather than tautology.

namespace canfilt::verify {

struct PropertyReport {
  std::string name;
  long trials{};
  double worst_violation{};
  double tolerance{};
  bool pass{};
  double slope{std::numeric_limits<double>::quiet_NaN()};  // calibration slope, when measured
  std::string note{};
};

[[nodiscard]] inline PropertyReport make_report(std::string name, long trials, double worst, double tol,
                                                double slope = std::numeric_limits<double>::quiet_NaN(),
                                                std::string note = {}) {
  PropertyReport r;
  r.name = std::move(name);
  r.trials = trials;
  r.worst_violation = worst;
  r.tolerance = tol;
  r.pass = worst <= tol;
  r.slope = slope;
  r.note = std::move(note);
  return r;
}

[[nodiscard]] inline nlohmann::json to_json(const PropertyReport& r) {
  nlohmann::json j{{"name", r.name},
                   {"trials", r.trials},
                   {"worst_violation", r.worst_violation},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}};
  if (std::isfinite(r.slope)) j["slope"] = r.slope;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

[[nodiscard]] inline bool all_passed(const std::vector<PropertyReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const PropertyReport& r) { return r.pass; });
}

// --- independent oracles -----------------------------------------------------

namespace oracle {

/// Matrix exponential via scaling and squaring of the power series, summed to
/// machine precision.  Verification-only; never part of the production path.
[[nodiscard]] inline Mat2d expm_series(Mat2d a) {
  int squarings = 0;
  while (frob_norm(a) > 0.5) {
    a = 0.5 * a;
    ++squarings;
  }
  Mat2d sum = Mat2d::identity();
  Mat2d term = Mat2d::identity();
  for (int k = 1; k <= 60; ++k) {
    term = (1.0 / k) * (term * a);
    sum = sum + term;
    if (frob_norm(term) <= 1e-18 * frob_norm(sum)) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Exhaustive Frobenius-nearest search over the PSD lattice
/// a, c in [0, 1], b in [-1, 1] on multiples of `step`, with b^2 <= a c.
[[nodiscard]] inline SymMat2d project_psd_grid(const SymMat2d& x, double step) {
  const long n = std::lround(1.0 / step);
  double best = std::numeric_limits<double>::infinity();
  SymMat2d argmin{};
  for (long ia = 0; ia <= n; ++ia) {
    const double a = static_cast<double>(ia) * step;
    const double da = a - x.h11;
    for (long ic = 0; ic <= n; ++ic) {
      const double c = static_cast<double>(ic) * step;
      const double dc = c - x.h22;
      const double base = da * da + dc * dc;
      if (base >= best) continue;
      const double ac = a * c;
      const long nb = static_cast<long>(std::floor(std::sqrt(ac) / step)) + 1;
      for (long ib = -nb; ib <= nb; ++ib) {
        const double b = static_cast<double>(ib) * step;
        if (b * b > ac) continue;
        const double db = b - x.h12;
        const double d = base + 2.0 * db * db;
        if (d < best) {
          best = d;
          argmin = {a, b, c};
        }
      }
    }
  }
  return argmin;
}

}  // namespace oracle

namespace detail {

[[nodiscard]] inline SymMat2d random_symmetric(CounterRng<double>& rng, double lo, double hi) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

[[nodiscard]] inline SymMat2d random_psd(CounterRng<double>& rng, double lo, double hi) {
  const Mat2d g{rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
  const Mat2d gram = g.transpose() * g;
  return {gram.a11, gram.a12, gram.a22};
}

}  // namespace detail

// --- eigenvalue derivative (smallest-eigenvalue rate formula) ----------------

/// For random smooth symmetric paths H(t) with a simple smallest eigenvalue,
/// compares the central difference of lambda_min against v_min^T H'(0) v_min.
/// Violations are guarded-relative: |cd - formula| / max(1, |formula|).
[[nodiscard]] inline PropertyReport check_eigenvalue_derivative(long trials = 1000,
                                                                std::uint64_t seed = 0xE16E5ULL) {
  constexpr double kStep = 1e-5;
  constexpr double kMinGap = 1e-3;
  const auto lambda_min_at = [](const SymMat2d& a, const SymMat2d& b, const SymMat2d& c, double t) {
    return eig(a + t * b + (t * t) * c).lambda2;
  };

  double worst = 0.0;
  long done = 0;
  std::uint64_t attempt = 0;
  // calibration: mean violation at step h vs 2h over a subsample (expected slope ~ 2)
  double cal_h = 0.0, cal_2h = 0.0;
  long cal_n = 0;

  while (done < trials && attempt < static_cast<std::uint64_t>(trials) * 10) {
    CounterRng<double> rng(derive_stream(seed, attempt++));
    const SymMat2d a = detail::random_symmetric(rng, -3.0, 3.0);
    const auto ea = eig(a);
    if (ea.lambda1 - ea.lambda2 < kMinGap) continue;  // the formula needs a simple eigenvalue
    const SymMat2d b = detail::random_symmetric(rng, -2.0, 2.0);
    const SymMat2d c = detail::random_symmetric(rng, -2.0, 2.0);

    const double formula = dot(ea.v2, b * ea.v2);
    const double cd = (lambda_min_at(a, b, c, kStep) - lambda_min_at(a, b, c, -kStep)) / (2.0 * kStep);
    const double viol = std::abs(cd - formula) / std::max(1.0, std::abs(formula));
    worst = std::max(worst, viol);

    if (cal_n < 50) {
      const double cd2 = (lambda_min_at(a, b, c, 2 * kStep) - lambda_min_at(a, b, c, -2 * kStep)) / (4.0 * kStep);
      cal_h += viol;
      cal_2h += std::abs(cd2 - formula) / std::max(1.0, std::abs(formula));
      ++cal_n;
    }
    ++done;
  }
  const double slope = (cal_h > 0 && cal_2h > 0) ? std::log2(cal_2h / cal_h)
                                                 : std::numeric_limits<double>::quiet_NaN();
  return make_report("eigenvalue_derivative", done, worst, 1e-4, slope);
}

// --- projection optimality ----------------------------------------------------

/// Variational inequality <X - P(X), Y - P(X)> <= tol over random symmetric X
/// and random PSD Y, plus a brute-force lattice search on three fixed cases.
[[nodiscard]] inline std::vector<PropertyReport> check_projection_optimality(
    long trials = 10000, double grid_step = 1e-3, std::uint64_t seed = 0x9805DULL) {
  double worst_vi = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < trials; ++i) {
    CounterRng<double> rng(derive_stream(seed, static_cast<std::uint64_t>(i)));
    const SymMat2d x = detail::random_symmetric(rng, -3.0, 3.0);
    const SymMat2d y = detail::random_psd(rng, -3.0, 3.0);
    const SymMat2d p = project_psd(x);
    worst_vi = std::max(worst_vi, frob_inner(x - p, y - p));
  }

  const SymMat2d cases[] = {
      {0.5, 0.2, 0.8},    // already PSD
      {1.0, 0.0, -1.0},   // clipping on a diagonal matrix
      {0.0, -0.5, 0.0},   // indefinite with negative coupling
  };
  double worst_grid = 0.0;
  for (const auto& x : cases) {
    const SymMat2d lattice = oracle::project_psd_grid(x, grid_step);
    worst_grid = std::max(worst_grid, frob_norm(lattice - project_psd(x)));
  }

  return {make_report("projection_optimality.variational", trials, worst_vi, 1e-10),
          make_report("projection_optimality.grid_oracle", 3, worst_grid, 2e-3)};
}

// --- transition-matrix identities ----------------------------------------------

/// Inverse residual ||U(t,s) U(s,t) - I||_F decays first order under dt
/// halving, and composition over a shared grid is exact to rounding.
[[nodiscard]] inline std::vector<PropertyReport> check_transition_identities(
    std::vector<double> dt_levels = {4e-3, 2e-3, 1e-3, 5e-4}, double horizon = 1.0) {
  const auto h_path = [](double t) -> SymMat2d {
    return {1.6 + 0.4 * std::sin(2.0 * t), 0.3 * std::cos(t), 1.1 + 0.2 * std::sin(3.0 * t)};
  };

  std::vector<double> residuals;
  residuals.reserve(dt_levels.size());
  for (const double dt : dt_levels) {
    const auto fwd = transition_matrix(h_path, 0.0, horizon, dt, DriftSign::minus_jh);
    const auto bwd = transition_matrix_backward(h_path, 0.0, horizon, dt, DriftSign::minus_jh);
    residuals.push_back(transition_inverse_check(fwd, bwd));
  }
  bool monotone = true;
  double slope_sum = 0.0;
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
    monotone = monotone && residuals[i + 1] < residuals[i];
    slope_sum += std::log2(residuals[i] / residuals[i + 1]);
  }
  const double slope = slope_sum / static_cast<double>(residuals.size() - 1);
  const double slope_viol = monotone ? std::abs(slope - 1.0) : std::numeric_limits<double>::infinity();

  const double dt = 1e-3;
  const auto u_ts = transition_matrix(h_path, 0.0, horizon, dt, DriftSign::minus_jh);
  const auto u_tm = transition_matrix(h_path, 0.4, horizon, dt, DriftSign::minus_jh);
  const auto u_ms = transition_matrix(h_path, 0.0, 0.4, dt, DriftSign::minus_jh);
  const double comp = frob_norm(u_tm.U * u_ms.U - u_ts.U);

  return {make_report("transition_identities.inverse_residual", static_cast<long>(dt_levels.size()),
                      slope_viol, 0.2, slope),
          make_report("transition_identities.composition", 1, comp, 1e-10)};
}

// --- exponential propagator envelope -------------------------------------------

struct GronwallConfig {
  std::string name;
  std::function<SymMat2d(double)> h_path;
  double horizon{2.0};
  double dt{1e-3};
  DriftSign sign{DriftSign::minus_jh};
};

[[nodiscard]] inline std::vector<GronwallConfig> default_gronwall_configs(std::uint64_t seed = 0x96B0ULL) {
  std::vector<GronwallConfig> configs;
  configs.push_back({"zero", [](double) { return SymMat2d{}; }, 5.0, 1e-3, DriftSign::minus_jh});
  configs.push_back(
      {"constant_identity", [](double) { return SymMat2d::identity(); }, 2.0, 1e-3, DriftSign::minus_jh});

  // piecewise-constant PSD path with spectral norm 2, both sign conventions
  const auto segments = std::make_shared<std::vector<SymMat2d>>();
  CounterRng<double> rng(derive_stream(seed, 1));
  for (int i = 0; i < 8; ++i) {
    SymMat2d h = detail::random_psd(rng, -3.0, 3.0);
    const double nrm = spectral_norm(h);
    if (nrm > 0) h = (2.0 / nrm) * h;
    segments->push_back(h);
  }
  const auto piecewise = [segments](double t) {
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(t / 0.25), segments->size() - 1);
    return (*segments)[idx];
  };
  configs.push_back({"piecewise_psd_minus", piecewise, 2.0, 1e-3, DriftSign::minus_jh});
  configs.push_back({"piecewise_psd_plus", piecewise, 2.0, 1e-3, DriftSign::plus_jh});

  configs.push_back({"smooth_indefinite",
                     [](double t) -> SymMat2d {
                       return {1.2 * std::sin(3.0 * t), 0.8 * std::cos(2.0 * t), -0.9 * std::sin(t)};
                     },
                     2.0, 1e-3, DriftSign::minus_jh});
  return configs;
}

/// max_k ||U(t_k, 0)|| <= 1.1 exp(M T) with M the largest spectral norm of H
/// along the grid; ||J|| = 1.
[[nodiscard]] inline PropertyReport check_gronwall_bound(
    const std::vector<GronwallConfig>& configs = default_gronwall_configs()) {
  double worst = -std::numeric_limits<double>::infinity();
  std::string note;
  for (const auto& cfg : configs) {
    const auto n = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    Mat2d u = Mat2d::identity();
    double max_u = 1.0;
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double tau = static_cast<double>(k) * cfg.dt;
      const SymMat2d h = cfg.h_path(tau);
      m = std::max(m, spectral_norm(h));
      u = u + cfg.dt * (canfilt::detail::system_matrix<double>(h, cfg.sign) * u);
      max_u = std::max(max_u, spectral_norm(u));
    }
    m = std::max(m, spectral_norm(cfg.h_path(cfg.horizon)));
    const double bound = 1.1 * std::exp(m * cfg.horizon);
    const double viol = max_u - bound;
    if (viol > worst) {
      worst = viol;
      note = cfg.name;
    }
  }
  return make_report("gronwall_bound", static_cast<long>(configs.size()), worst, 0.0,
                     std::numeric_limits<double>::quiet_NaN(), "worst config: " + note);
}

// --- sensitivity of the state to Hamiltonian perturbations ----------------------

struct SensitivityConfig {
  std::string name;
  FilterConfig run;   // alpha must be zero: the recurrence assumes a fixed H path
  SymMat2d delta_h;
  bool check_envelope{true};  // only meaningful for unforced runs with ||y0|| <= 1
};

[[nodiscard]] inline std::vector<SensitivityConfig> default_sensitivity_configs() {
  FilterConfig homogeneous;
  homogeneous.T = 2.0;
  homogeneous.dt = 1e-3;
  homogeneous.alpha = 0.0;
  homogeneous.y0 = {1.0, 0.0};
  homogeneous.signal.kind = SignalKind::constant;
  homogeneous.signal.constant_value = 0.0;
  homogeneous.signal.noise_std = 0.0;
  homogeneous.sign_mode = DriftSign::minus_jh;

  FilterConfig homogeneous_plus = homogeneous;
  homogeneous_plus.sign_mode = DriftSign::plus_jh;

  FilterConfig driven;  // reference-tracking configuration truncated to a short horizon
  driven.T = 2.0;
  driven.dt = 1e-3;
  driven.alpha = 0.0;
  driven.sign_mode = DriftSign::minus_jh;

  FilterConfig driven_plus = driven;
  driven_plus.sign_mode = DriftSign::plus_jh;

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return {
      {"homogeneous_e11", homogeneous, SymMat2d{1.0, 0.0, 0.0}, true},
      {"homogeneous_offdiag", homogeneous, SymMat2d{0.0, inv_sqrt2, 0.0}, true},
      {"homogeneous_plus_identity", homogeneous_plus, SymMat2d{inv_sqrt2, 0.0, inv_sqrt2}, true},
      {"driven_e11", driven, SymMat2d{1.0, 0.0, 0.0}, false},
      {"driven_plus_offdiag", driven_plus, SymMat2d{0.0, inv_sqrt2, 0.0}, false},
  };
}

namespace detail {

/// Integrates the sensitivity recurrence along a recorded trajectory with a
/// frozen Hamiltonian; returns phi at every row.
[[nodiscard]] inline std::vector<Vec2d> integrate_sensitivity(const RunRecord<double>& rec,
                                                              const SymMat2d& h, const SymMat2d& delta_h,
                                                              DriftSign sign) {
  SensitivityState<double> st{{0.0, 0.0}, delta_h};
  std::vector<Vec2d> phis;
  phis.reserve(rec.rows());
  phis.push_back(st.phi);
  for (std::size_t k = 0; k < rec.steps; ++k) {
    st = sensitivity_step(st, h, Vec2d{rec.y1[k], rec.y2[k]}, rec.dt, sign);
    phis.push_back(st.phi);
  }
  return phis;
}

}  // namespace detail

/// Exponential envelope on ||phi||, agreement with the difference-quotient
/// oracle, and linearity in the perturbation direction.
[[nodiscard]] inline std::vector<PropertyReport> check_sensitivity_bound(
    const std::vector<SensitivityConfig>& configs = default_sensitivity_configs()) {
  double worst_env = -std::numeric_limits<double>::infinity();
  double worst_quot = 0.0;
  double worst_lin = 0.0;
  double quot_coarse = 0.0;  // for the epsilon-halving slope
  long envelopes = 0;

  for (const auto& cfg : configs) {
    if (cfg.run.alpha != 0.0)
      throw std::invalid_argument("check_sensitivity_bound: configs must freeze the Hamiltonian");
    const RunRecord<double> rec = run_simulation(cfg.run);
    const SymMat2d h = cfg.run.H0;
    const auto phi = detail::integrate_sensitivity(rec, h, cfg.delta_h, cfg.run.sign_mode);

    double phi_max = 0.0;
    for (const auto& p : phi) phi_max = std::max(phi_max, norm(p));

    if (cfg.check_envelope) {
      const double m = spectral_norm(h);
      const double bound =
          1.1 * std::exp(m * cfg.run.T) * std::exp(m * cfg.run.T) * cfg.run.T * spectral_norm(cfg.delta_h);
      worst_env = std::max(worst_env, phi_max - bound);
      ++envelopes;
    }

    // difference quotient at two perturbation sizes
    for (const double eps : {2e-6, 1e-6}) {
      FilterConfig pert = cfg.run;
      pert.H0 = cfg.run.H0 + eps * cfg.delta_h;
      const RunRecord<double> rec_p = run_simulation(pert);
      double err = 0.0;
      for (std::size_t k = 0; k < rec.rows(); ++k) {
        const Vec2d quot{(rec_p.y1[k] - rec.y1[k]) / eps, (rec_p.y2[k] - rec.y2[k]) / eps};
        err = std::max(err, norm(quot - phi[k]));
      }
      const double rel = err / std::max(phi_max, 1e-12);
      if (eps == 1e-6) worst_quot = std::max(worst_quot, rel);
      else quot_coarse = std::max(quot_coarse, rel);
    }

    // doubling delta_h doubles phi
    const auto phi2 = detail::integrate_sensitivity(rec, h, 2.0 * cfg.delta_h, cfg.run.sign_mode);
    double lin = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) lin = std::max(lin, norm(phi2[k] - 2.0 * phi[k]));
    worst_lin = std::max(worst_lin, lin / std::max(1.0, 2.0 * phi_max));
  }

  const double slope = (worst_quot > 0 && quot_coarse > 0)
                           ? std::log2(quot_coarse / worst_quot)
                           : std::numeric_limits<double>::quiet_NaN();
  return {make_report("sensitivity_bound.envelope", envelopes, worst_env, 0.0),
          make_report("sensitivity_bound.difference_quotient", static_cast<long>(configs.size()),
                      worst_quot, 1e-3, slope),
          make_report("sensitivity_bound.linearity", static_cast<long>(configs.size()), worst_lin, 1e-10)};
}

// --- PSD invariance under adaptation ---------------------------------------------

/// Both sign conventions x both projection placements x alpha x dt.
[[nodiscard]] inline std::vector<FilterConfig> default_psd_invariance_grid() {
  std::vector<FilterConfig> grid;
  for (const DriftSign sign : {DriftSign::minus_jh, DriftSign::plus_jh}) {
    for (const ProjMode proj : {ProjMode::project_update, ProjMode::project_gradient}) {
      for (const double alpha : {1e-4, 1e-2, 1.0}) {
        for (const double dt : {0.02, 0.01, 0.005}) {
          FilterConfig cfg;
          cfg.sign_mode = sign;
          cfg.proj_mode = proj;
          cfg.alpha = alpha;
          cfg.dt = dt;
          grid.push_back(cfg);
        }
      }
    }
  }
  return grid;
}

/// Runs every config to completion and reports the most negative Hamiltonian
/// eigenvalue seen at any step, as -min lambda_min.
template <class Projector = PsdProjector>
[[nodiscard]] PropertyReport check_psd_invariance(
    const std::vector<FilterConfig>& configs = default_psd_invariance_grid(), Projector&& project = {}) {
  double worst = -std::numeric_limits<double>::infinity();
  std::string note;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    try {
      const RunRecord<double> rec = run_simulation(configs[i], NullObserver{}, project);
      for (const double l : rec.lambda_min_h) worst = std::max(worst, -l);
    } catch (const numerical_error& err) {
      worst = std::numeric_limits<double>::infinity();
      note += "config " + std::to_string(i) + " aborted: " + err.what() + "; ";
    }
  }
  return make_report("psd_invariance", static_cast<long>(configs.size()), worst, 1e-12,
                     std::numeric_limits<double>::quiet_NaN(), note);
}

// --- suite driver -------------------------------------------------------------

inline const std::vector<std::string>& suite_check_names() {
  static const std::vector<std::string> names{"eigenvalue_derivative", "projection_optimality",
                                              "transition_identities", "gronwall_bound",
                                              "sensitivity_bound",     "psd_invariance"};
  return names;
}

/// Runs the selected checks ("all", "none", or a list of check names).
[[nodiscard]] inline std::vector<PropertyReport> run_suite(const std::vector<std::string>& selection) {
  const bool all = std::find(selection.begin(), selection.end(), "all") != selection.end();
  const auto wanted = [&](const std::string& name) {
    return all || std::find(selection.begin(), selection.end(), name) != selection.end();
  };
  for (const auto& s : selection) {
    if (s != "all" && s != "none" &&
        std::find(suite_check_names().begin(), suite_check_names().end(), s) == suite_check_names().end())
      throw std::invalid_argument("unknown verify selection: " + s);
  }

  std::vector<PropertyReport> out;
  if (wanted("eigenvalue_derivative")) out.push_back(check_eigenvalue_derivative());
  if (wanted("projection_optimality")) {
    for (auto& r : check_projection_optimality()) out.push_back(std::move(r));
  }
  if (wanted("transition_identities")) {
    for (auto& r : check_transition_identities()) out.push_back(std::move(r));
  }
  if (wanted("gronwall_bound")) out.push_back(check_gronwall_bound());
  if (wanted("sensitivity_bound")) {
    for (auto& r : check_sensitivity_bound()) out.push_back(std::move(r));
  }
  if (wanted("psd_invariance")) out.push_back(check_psd_invariance());
  return out;
}

}  // namespace canfilt::verify
