#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "canfilt/adapt.hpp"
#include "canfilt/canonical.hpp"
#include "canfilt/errors.hpp"
#include "canfilt/metrics.hpp"
#include "canfilt/signals.hpp"
#include "canfilt/symmat.hpp"

namespace canfilt {

/// Full run description.  The defaults are the library's reference
/// experiment: a frequency-modulated sinusoid tracked over 30 s at dt = 0.01
/// with a conservative learning rate.
struct FilterConfig {
  double T = 30.0;
  double dt = 0.01;
  double alpha = 1e-4;
  Vec2d y0{0.1, 0.0};
  SymMat2d H0{2.0, 0.3, 1.5};
  SystemMatrices<double> sys{};
  SignalSpec<double> signal{};
  std::uint64_t seed = 0;
  DriftSign sign_mode = DriftSign::plus_jh;
  GradMode grad_mode = GradMode::closed_form;
  ProjMode proj_mode = ProjMode::project_update;
  double fd_epsilon = 0.0;  // 0 selects the scaled default
  double z = 1.0;           // metadata only; never enters the dynamics

  [[nodiscard]] std::size_t step_count() const {
    return static_cast<std::size_t>(std::llround(T / dt));
  }

  void validate() const {
    if (!(dt > 0)) throw std::invalid_argument("config: dt must be positive");
    if (!(T > 0)) throw std::invalid_argument("config: T must be positive");
    const double n = std::round(T / dt);
    if (n < 1 || std::abs(T - n * dt) > 1e-9)
      throw std::invalid_argument("config: T must be an integer multiple of dt");
    if (!(alpha >= 0)) throw std::invalid_argument("config: alpha must be nonnegative");
    if (!is_finite(y0) || !is_finite(H0)) throw std::invalid_argument("config: non-finite initial data");
    if (lambda_min(H0) < -1e-12) throw std::invalid_argument("config: H0 must be positive semidefinite");
    if (!(signal.noise_std >= 0)) throw std::invalid_argument("config: noise_std must be nonnegative");
    if (fd_epsilon < 0) throw std::invalid_argument("config: fd_epsilon must be nonnegative");
    if (signal.kind == SignalKind::custom_table && signal.table.empty())
      throw std::invalid_argument("config: custom_table signal has no samples");
  }
};

/// Loop phases in execution order, exposed for instrumentation.
enum class StepPhase { error, gradient, hamiltonian_update, projection, state_update, time_increment };

struct NullObserver {
  constexpr void operator()(StepPhase, std::size_t) const noexcept {}
};

/// Runs the adaptation loop.  Each step k = 0..N-1: sample the reference,
/// form the tracking error from the current state, take one projected
/// gradient step on H, then advance the state one Euler step under the
/// pre-update Hamiltonian.  Rows 0..N are recorded; row N is evaluated after
/// the final step.
template <class Observer = NullObserver, class Projector = PsdProjector>
[[nodiscard]] RunRecord<double> run_simulation(const FilterConfig& cfg, Observer&& observe = {},
                                               Projector&& project = {}) {
  cfg.validate();
  const std::size_t n = cfg.step_count();

  SignalSpec<double> sig = cfg.signal;
  sig.seed = cfg.seed;

  AdaptConfig<double> acfg{cfg.alpha, cfg.grad_mode, cfg.proj_mode, cfg.fd_epsilon};

  RunRecord<double> rec;
  rec.dt = cfg.dt;
  rec.steps = n;
  const auto reserve = n + 1;
  rec.t.reserve(reserve);
  rec.y1.reserve(reserve);
  rec.y2.reserve(reserve);
  rec.u.reserve(reserve);
  rec.r.reserve(reserve);
  rec.e.reserve(reserve);
  rec.V.reserve(reserve);
  rec.lambda_min_h.reserve(reserve);
  rec.h11.reserve(reserve);
  rec.h12.reserve(reserve);
  rec.h22.reserve(reserve);

  StateVec<double> y = cfg.y0;
  SymMat2d H = cfg.H0;

  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const SignalSample<double> s = sample(sig, t, k);
    const ErrorSample<double> es = tracking_error(y, s.r, cfg.sys, t);
    rec.push_row(t, y, es.u, s.r, es.e, H);
    if (k == n) break;
    observe(StepPhase::error, k);

    Mat2d grad;
    if (cfg.grad_mode == GradMode::closed_form) {
      grad = grad_closed_form(y, cfg.sys);
    } else {
      // One-step lookahead error functional.  The lookahead always uses the
      // minus_jh drift, the convention under which the closed-form gradient
      // is derived, so both gradient modes estimate the same quantity and
      // are interchangeable in the update law.  The 1/dt factor restores
      // the continuous-rate scale accrued over the lookahead step.
      const double r_next = sample(sig, t + cfg.dt, k + 1).r;
      const auto lookahead = [&](const SymMat2d& hp) {
        const StateVec<double> yn = euler_step(hp, y, s.r, cfg.dt, cfg.sys, DriftSign::minus_jh);
        return cfg.sys.output(yn) - r_next;
      };
      const double eps = cfg.fd_epsilon > 0 ? cfg.fd_epsilon : default_fd_epsilon(H);
      grad = (1.0 / cfg.dt) * grad_finite_difference(H, lookahead, eps);
    }
    observe(StepPhase::gradient, k);

    const HamiltonianUpdate<double> up = hamiltonian_update_detail(H, es.e, grad, cfg.dt, acfg, project);
    observe(StepPhase::hamiltonian_update, k);
    observe(StepPhase::projection, k);
    if (up.safeguard_delta > 1e-12) {
      ++rec.safeguard_count;
      rec.safeguard_max_delta = std::max(rec.safeguard_max_delta, up.safeguard_delta);
    }

    y = euler_step(H, y, s.r, cfg.dt, cfg.sys, cfg.sign_mode);  // pre-update H
    H = up.H;
    observe(StepPhase::state_update, k);
    observe(StepPhase::time_increment, k);

    if (!is_finite(y) || !is_finite(H))
      throw numerical_error("run_simulation: non-finite state at step " + std::to_string(k + 1) +
                            " (t = " + std::to_string(t + cfg.dt) + ")");
  }

  rec.final_H = H;
  return rec;
}

/// Time-step refinement study: one run per dt, shared seed and signal.
struct StudySpec {
  std::vector<double> dt_list{0.02, 0.01, 0.005, 0.0025};
  FilterConfig base{};

  void validate() const {
    if (dt_list.empty()) throw std::invalid_argument("study: dt list is empty");
    for (const double dt : dt_list) {
      FilterConfig cfg = base;
      cfg.dt = dt;
      cfg.validate();
    }
  }
};

/// Runs the study; rows come back in dt_list order.  The per-dt runs are
/// independent and execute concurrently.
[[nodiscard]] inline std::vector<StabilityIndicators<double>> run_refinement_study(const StudySpec& study) {
  study.validate();
  std::vector<std::future<StabilityIndicators<double>>> jobs;
  jobs.reserve(study.dt_list.size());
  for (const double dt : study.dt_list) {
    FilterConfig cfg = study.base;
    cfg.dt = dt;
    jobs.push_back(std::async(std::launch::async, [cfg] { return compute_indicators(run_simulation(cfg)); }));
  }
  std::vector<StabilityIndicators<double>> rows;
  rows.reserve(jobs.size());
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

}  // namespace canfilt
