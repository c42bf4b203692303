#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>

#include "canfilt/canonical.hpp"
#include "canfilt/errors.hpp"
#include "canfilt/symmat.hpp"

namespace canfilt {

enum class GradMode { closed_form, finite_difference };

/// Placement of the PSD projection in the discrete update:
///   project_update:   H+ = P(H - step)
///   project_gradient: H+ = H - 2 a dt e P(grad), then a safeguard projection
enum class ProjMode { project_update, project_gradient };

template <std::floating_point T>
struct AdaptConfig {
  T alpha{T(1e-4)};
  GradMode grad_mode{GradMode::closed_form};
  ProjMode proj_mode{ProjMode::project_update};
  T fd_epsilon{T(0)};  // 0 selects the scaled default
};

/// One tracking-error evaluation: u = C y, e = u - r.
template <std::floating_point T>
struct ErrorSample {
  T t{};
  T e{};
  T u{};
  T r{};
};

template <std::floating_point T>
[[nodiscard]] constexpr ErrorSample<T> tracking_error(StateVec<T> y, T r, const SystemMatrices<T>& sys,
                                                      T t = T(0)) noexcept {
  const T u = sys.output(y);
  return {t, u - r, u, r};
}

/// Instantaneous error gradient with respect to the Hamiltonian entries,
///   [[ c2 y1, -c1 y1 ],
///    [ c2 y2, -c1 y2 ]],
/// generally non-symmetric; callers symmetrize before stepping.
template <std::floating_point T>
[[nodiscard]] constexpr Mat2<T> grad_closed_form(StateVec<T> y, const SystemMatrices<T>& sys) noexcept {
  return {sys.C.y * y.x, -sys.C.x * y.x, sys.C.y * y.y, -sys.C.x * y.y};
}

/// Default forward-difference perturbation size, scaled to the matrix.
template <std::floating_point T>
[[nodiscard]] T default_fd_epsilon(const SymMat2<T>& H) noexcept {
  return T(1e-6) * std::max(T(1), frob_norm(H));
}

/// Forward-difference gradient of an error functional e(H).  Each entry is a
/// directional difference along the symmetrized unit basis matrix; the off-
/// diagonal probes coincide, so three directions are evaluated and the result
/// is symmetric.
template <std::floating_point T, class ErrorFn>
[[nodiscard]] Mat2<T> grad_finite_difference(const SymMat2<T>& H, ErrorFn&& error_of, T fd_epsilon) {
  if (!(fd_epsilon > T(0))) throw std::invalid_argument("grad_finite_difference: fd_epsilon must be positive");
  const T e0 = error_of(H);
  const T d11 = (error_of(SymMat2<T>{H.h11 + fd_epsilon, H.h12, H.h22}) - e0) / fd_epsilon;
  const T d22 = (error_of(SymMat2<T>{H.h11, H.h12, H.h22 + fd_epsilon}) - e0) / fd_epsilon;
  // symmetrized off-diagonal basis [[0, 1/2], [1/2, 0]]
  const T d12 = (error_of(SymMat2<T>{H.h11, H.h12 + fd_epsilon / T(2), H.h22}) - e0) / fd_epsilon;
  const Mat2<T> g{d11, d12, d12, d22};
  if (!std::isfinite(e0) || !is_finite(g))
    throw numerical_error("grad_finite_difference: non-finite error evaluation");
  return g;
}

/// Default projection used by the update; replaceable in tests.
struct PsdProjector {
  template <std::floating_point T>
  [[nodiscard]] SymMat2<T> operator()(const Mat2<T>& m) const noexcept {
    return project_psd(m);
  }
};

template <std::floating_point T>
struct HamiltonianUpdate {
  SymMat2<T> H{};
  /// Frobenius distance moved by the safeguard projection; zero in
  /// project_update mode.
  T safeguard_delta{};
};

/// One projected gradient step H+ = P(H - 2 a dt e sym(grad)) (or the
/// gradient-projected variant).  Both modes end inside the PSD cone.
template <std::floating_point T, class Projector = PsdProjector>
[[nodiscard]] HamiltonianUpdate<T> hamiltonian_update_detail(const SymMat2<T>& H, T e, const Mat2<T>& grad,
                                                             T dt, const AdaptConfig<T>& cfg,
                                                             Projector&& project = {}) {
  const T step = T(2) * cfg.alpha * dt * e;
  if (cfg.proj_mode == ProjMode::project_update) {
    const SymMat2<T> raw = symmetrize(grad);
    return {project((H - step * raw).full()), T(0)};
  }
  const SymMat2<T> projected_grad = project(grad);
  const SymMat2<T> raw = H - step * projected_grad;
  const SymMat2<T> safe = project(raw.full());
  return {safe, frob_norm(safe - raw)};
}

template <std::floating_point T, class Projector = PsdProjector>
[[nodiscard]] SymMat2<T> hamiltonian_update(const SymMat2<T>& H, T e, const Mat2<T>& grad, T dt,
                                            const AdaptConfig<T>& cfg, Projector&& project = {}) {
  return hamiltonian_update_detail(H, e, grad, dt, cfg, std::forward<Projector>(project)).H;
}

}  // namespace canfilt
