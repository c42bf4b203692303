#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>

#include "canfilt/errors.hpp"
#include "canfilt/symmat.hpp"

namespace canfilt {

template <std::floating_point T>
using StateVec = Vec2<T>;

/// Sign convention of the driven dynamics:
///   minus_jh:  y' = -J H y + B r
///   plus_jh:   y' = +J H y + B r
enum class DriftSign { minus_jh, plus_jh };

/// Output row C, input column B, and the fixed rotation J.
template <std::floating_point T>
struct SystemMatrices {
  Vec2<T> C{T(1), T(0)};
  Vec2<T> B{T(1), T(0)};

  // J is a compile-time constant: J^2 = -I and J^T = -J hold exactly.
  [[nodiscard]] static constexpr Mat2<T> J() noexcept { return {T(0), T(1), T(-1), T(0)}; }

  [[nodiscard]] constexpr T output(StateVec<T> y) const noexcept { return dot(C, y); }
};

/// Right-hand side of the driven dynamics under the chosen sign convention.
template <std::floating_point T>
[[nodiscard]] constexpr StateVec<T> drift(const SymMat2<T>& H, StateVec<T> y, T r,
                                          const SystemMatrices<T>& sys, DriftSign sign) noexcept {
  const StateVec<T> hy = H * y;
  const StateVec<T> jhy{hy.y, -hy.x};  // J * (H y)
  const StateVec<T> forcing{sys.B.x * r, sys.B.y * r};
  return sign == DriftSign::plus_jh ? jhy + forcing : -jhy + forcing;
}

/// One explicit Euler step of the state.
template <std::floating_point T>
[[nodiscard]] constexpr StateVec<T> euler_step(const SymMat2<T>& H, StateVec<T> y, T r, T dt,
                                               const SystemMatrices<T>& sys, DriftSign sign) noexcept {
  return y + dt * drift(H, y, r, sys, sign);
}

namespace detail {

/// A(t) = -+ J H(t), the homogeneous system matrix.
template <std::floating_point T>
[[nodiscard]] constexpr Mat2<T> system_matrix(const SymMat2<T>& H, DriftSign sign) noexcept {
  // J * H = [[h12, h22], [-h11, -h12]]
  const Mat2<T> jh{H.h12, H.h22, -H.h11, -H.h12};
  return sign == DriftSign::plus_jh ? jh : T(-1) * jh;
}

template <std::floating_point T>
[[nodiscard]] inline std::size_t grid_steps(T span, T dt, const char* what) {
  if (!(dt > T(0))) throw std::invalid_argument(std::string(what) + ": dt must be positive");
  if (span < T(0)) throw std::invalid_argument(std::string(what) + ": time interval is reversed");
  const T steps = std::round(span / dt);
  if (std::abs(span - steps * dt) > T(1e-9))
    throw std::invalid_argument(std::string(what) + ": interval is not an integer multiple of dt");
  return static_cast<std::size_t>(steps);
}

}  // namespace detail

/// Propagator of the homogeneous system from time s (origin) to time t:
/// y(t) = U * y(s), U(s, s) = I.  For the backward propagator the endpoint
/// precedes the origin.
template <std::floating_point T>
struct TransitionMatrix {
  Mat2<T> U = Mat2<T>::identity();
  T s{};  // origin
  T t{};  // endpoint
};

/// Integrates dU/dtau = A(tau) U from s to t with the same Euler scheme as
/// the state, so the columns coincide bit for bit with unit-state
/// propagations on the shared grid.
template <std::floating_point T, class HPath>
[[nodiscard]] TransitionMatrix<T> transition_matrix(HPath&& h_of_t, T s, T t, T dt, DriftSign sign) {
  const std::size_t n = detail::grid_steps(t - s, dt, "transition_matrix");
  TransitionMatrix<T> out{Mat2<T>::identity(), s, t};
  for (std::size_t k = 0; k < n; ++k) {
    const T tau = s + static_cast<T>(k) * dt;
    const Mat2<T> a = detail::system_matrix<T>(h_of_t(tau), sign);
    out.U = out.U + dt * (a * out.U);
    if (!is_finite(out.U))
      throw numerical_error("transition_matrix: non-finite entry at tau = " + std::to_string(tau));
  }
  return out;
}

/// Integrates the backward equation dV/dtau = -V A(tau), V(s, s) = I, from
/// tau = s to tau = t.  The result approximates the inverse propagator
/// (endpoint s, origin t).
template <std::floating_point T, class HPath>
[[nodiscard]] TransitionMatrix<T> transition_matrix_backward(HPath&& h_of_t, T s, T t, T dt, DriftSign sign) {
  const std::size_t n = detail::grid_steps(t - s, dt, "transition_matrix_backward");
  TransitionMatrix<T> out{Mat2<T>::identity(), t, s};
  for (std::size_t k = 0; k < n; ++k) {
    const T tau = s + static_cast<T>(k) * dt;
    const Mat2<T> a = detail::system_matrix<T>(h_of_t(tau), sign);
    out.U = out.U - dt * (out.U * a);
    if (!is_finite(out.U))
      throw numerical_error("transition_matrix_backward: non-finite entry at tau = " + std::to_string(tau));
  }
  return out;
}

/// || U(t,s) U(s,t) - I ||_F for a forward/backward pair over the same
/// interval.  Zero for s = t; O(dt) otherwise.
template <std::floating_point T>
[[nodiscard]] T transition_inverse_check(const TransitionMatrix<T>& fwd, const TransitionMatrix<T>& bwd) {
  if (fwd.s != bwd.t || fwd.t != bwd.s)
    throw std::invalid_argument("transition_inverse_check: endpoints do not match");
  return frob_norm(fwd.U * bwd.U - Mat2<T>::identity());
}

/// State derivative with respect to a fixed perturbation direction delta_h of
/// the Hamiltonian.  phi starts at zero and obeys
///   phi' = -+ J (H phi + delta_h y)
/// under the same sign convention as the state.
template <std::floating_point T>
struct SensitivityState {
  StateVec<T> phi{};
  SymMat2<T> delta_h{};
};

template <std::floating_point T>
[[nodiscard]] constexpr SensitivityState<T> sensitivity_step(const SensitivityState<T>& state,
                                                             const SymMat2<T>& H, StateVec<T> y, T dt,
                                                             DriftSign sign) noexcept {
  const StateVec<T> forced = H * state.phi + state.delta_h * y;
  const StateVec<T> j_forced{forced.y, -forced.x};
  const StateVec<T> rate = sign == DriftSign::plus_jh ? j_forced : -j_forced;
  return {state.phi + dt * rate, state.delta_h};
}

}  // namespace canfilt
