#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "canfilt/symmat.hpp"

namespace canfilt {

/// Per-run summary: peak state norm, smallest Hamiltonian eigenvalue over the
/// run, and error statistics over the n in-loop samples.
template <std::floating_point T>
struct StabilityIndicators {
  T Y_max{};
  T lambda_min{};
  T E_rms{};
  T E_max{};
  std::size_t N{};
  T dt{};
};

/// Complete trace of one simulation: rows 0..N at t_k = k dt.  Row 0 is the
/// initial condition; e and V in row k use the state and reference at t_k
/// before that step's updates.
template <std::floating_point T>
struct RunRecord {
  std::vector<T> t, y1, y2, u, r, e, V, lambda_min_h, h11, h12, h22;
  SymMat2<T> final_H{};
  T dt{};
  std::size_t steps{};  // N

  std::size_t safeguard_count{};
  T safeguard_max_delta{};

  [[nodiscard]] std::size_t rows() const noexcept { return t.size(); }
  [[nodiscard]] bool empty() const noexcept { return t.empty(); }

  void push_row(T time, Vec2<T> y, T out, T ref, T err, const SymMat2<T>& H) {
    t.push_back(time);
    y1.push_back(y.x);
    y2.push_back(y.y);
    u.push_back(out);
    r.push_back(ref);
    e.push_back(err);
    V.push_back(err * err / T(2));
    lambda_min_h.push_back(lambda_min(H));
    h11.push_back(H.h11);
    h12.push_back(H.h12);
    h22.push_back(H.h22);
  }

  [[nodiscard]] SymMat2<T> hamiltonian_at(std::size_t k) const { return {h11.at(k), h12.at(k), h22.at(k)}; }
};

/// Indicators over rows 1..N; the t = 0 initial-condition row is excluded.
/// The eigenvalue column is recomputed per row from the stored Hamiltonian.
template <std::floating_point T>
[[nodiscard]] StabilityIndicators<T> compute_indicators(const RunRecord<T>& rec) {
  if (rec.rows() < 2) throw std::invalid_argument("compute_indicators: record has no in-loop samples");
  StabilityIndicators<T> out;
  out.N = rec.rows() - 1;
  out.dt = rec.dt;
  T sum_sq = T(0);
  T lmin = std::numeric_limits<T>::infinity();
  for (std::size_t k = 1; k < rec.rows(); ++k) {
    const T yn = std::hypot(rec.y1[k], rec.y2[k]);
    out.Y_max = std::max(out.Y_max, yn);
    out.E_max = std::max(out.E_max, std::abs(rec.e[k]));
    sum_sq += rec.e[k] * rec.e[k];
    lmin = std::min(lmin, eig(rec.hamiltonian_at(k)).lambda2);
  }
  out.E_rms = std::sqrt(sum_sq / static_cast<T>(out.N));
  out.lambda_min = lmin;
  return out;
}

/// Streaming counterpart of compute_indicators; accumulates row by row.
template <std::floating_point T>
class StreamingIndicators {
 public:
  void push(Vec2<T> y, T e, const SymMat2<T>& H) noexcept {
    y_max_ = std::max(y_max_, std::hypot(y.x, y.y));
    e_max_ = std::max(e_max_, std::abs(e));
    sum_sq_ += e * e;
    lambda_min_ = std::min(lambda_min_, eig(H).lambda2);
    ++n_;
  }

  [[nodiscard]] StabilityIndicators<T> finalize(T dt) const {
    if (n_ == 0) throw std::invalid_argument("StreamingIndicators: no samples");
    return {y_max_, lambda_min_, std::sqrt(sum_sq_ / static_cast<T>(n_)), e_max_, n_, dt};
  }

 private:
  T y_max_{};
  T e_max_{};
  T sum_sq_{};
  T lambda_min_{std::numeric_limits<T>::infinity()};
  std::size_t n_{};
};

/// (t, V) pairs, V = e^2 / 2.
template <std::floating_point T>
[[nodiscard]] std::vector<std::pair<T, T>> lyapunov_trace(const RunRecord<T>& rec) {
  std::vector<std::pair<T, T>> out;
  out.reserve(rec.rows());
  for (std::size_t k = 0; k < rec.rows(); ++k) out.emplace_back(rec.t[k], rec.V[k]);
  return out;
}

template <std::floating_point T>
struct BoundednessReport {
  T y_bound{};
  T v_bound{};
  std::vector<std::size_t> violations;  // row indices where a bound is exceeded
  [[nodiscard]] bool pass() const noexcept { return violations.empty(); }
};

/// Flags every row where ||y_k|| > y_bound or V_k > v_bound.
template <std::floating_point T>
[[nodiscard]] BoundednessReport<T> boundedness_check(const RunRecord<T>& rec, T y_bound, T v_bound) {
  if (!(y_bound > T(0)) || !(v_bound > T(0)))
    throw std::invalid_argument("boundedness_check: bounds must be positive");
  BoundednessReport<T> out{y_bound, v_bound, {}};
  for (std::size_t k = 0; k < rec.rows(); ++k) {
    if (std::hypot(rec.y1[k], rec.y2[k]) > y_bound || rec.V[k] > v_bound) out.violations.push_back(k);
  }
  return out;
}

/// Best-effort transient length: the first time from which |e| stays below
/// 2 E_rms for a full second.  Empty when the trace never settles.
template <std::floating_point T>
[[nodiscard]] std::optional<T> estimate_transient(const RunRecord<T>& rec) {
  if (rec.rows() < 2 || !(rec.dt > T(0))) return std::nullopt;
  const T threshold = T(2) * compute_indicators(rec).E_rms;
  const std::size_t window = static_cast<std::size_t>(std::round(T(1) / rec.dt));
  std::size_t quiet = 0;
  for (std::size_t k = 0; k < rec.rows(); ++k) {
    quiet = std::abs(rec.e[k]) < threshold ? quiet + 1 : 0;
    if (quiet == window + 1) return rec.t[k + 1 - quiet];
  }
  return std::nullopt;
}

}  // namespace canfilt
