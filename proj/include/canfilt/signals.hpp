#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "canfilt/rng.hpp"

namespace canfilt {

enum class SignalKind { fm_sine, constant, custom_table };

/// Reference-signal description.  fm_sine produces
///   x(t) = sin(2 pi (base_freq + mod_amp sin(mod_freq_factor t)) t),
/// constant produces x(t) = constant_value, custom_table linearly
/// interpolates a loaded (t, value) table.  Gaussian noise of standard
/// deviation noise_std is added on top; r = x + n always holds exactly.
template <std::floating_point T>
struct SignalSpec {
  SignalKind kind{SignalKind::fm_sine};
  T base_freq{T(5)};
  T mod_amp{T(2)};
  T mod_freq_factor{T(0.1) * std::numbers::pi_v<T>};
  T constant_value{T(0)};
  T noise_std{T(0.1)};
  std::uint64_t seed{0};

  /// When set, the noise counter is derived from the sample time on a fixed
  /// microsecond lattice instead of the per-run step index, so runs with
  /// different dt see identical noise at coincident times.
  bool shared_noise{false};

  std::vector<std::array<T, 2>> table{};  // custom_table samples, t ascending
  std::string table_path{};               // provenance, echoed in outputs
};

template <std::floating_point T>
struct SignalSample {
  T t{};
  T x{};  // clean value
  T n{};  // noise
  T r{};  // x + n
};

/// Modulated frequency base_freq + mod_amp * sin(mod_freq_factor * t).
template <std::floating_point T>
[[nodiscard]] T instantaneous_freq(const SignalSpec<T>& spec, T t) noexcept {
  return spec.base_freq + spec.mod_amp * std::sin(spec.mod_freq_factor * t);
}

namespace detail {

template <std::floating_point T>
[[nodiscard]] T table_value(const std::vector<std::array<T, 2>>& table, T t) {
  if (table.empty()) throw std::invalid_argument("custom_table signal has no samples");
  if (t <= table.front()[0]) return table.front()[1];
  if (t >= table.back()[0]) return table.back()[1];
  const auto it = std::lower_bound(table.begin(), table.end(), t,
                                   [](const std::array<T, 2>& row, T val) { return row[0] < val; });
  if ((*it)[0] == t) return (*it)[1];
  const auto lo = *(it - 1);
  const auto hi = *it;
  const T w = (t - lo[0]) / (hi[0] - lo[0]);
  return lo[1] + w * (hi[1] - lo[1]);
}

template <std::floating_point T>
[[nodiscard]] std::uint64_t noise_counter(const SignalSpec<T>& spec, T t, std::uint64_t k) noexcept {
  if (!spec.shared_noise) return k;
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(t) * 1e6));
}

}  // namespace detail

/// Sample the signal at time t; k is the per-run draw counter.
template <std::floating_point T>
[[nodiscard]] SignalSample<T> sample(const SignalSpec<T>& spec, T t, std::uint64_t k) {
  T x{};
  switch (spec.kind) {
    case SignalKind::fm_sine:
      x = std::sin(T(2) * std::numbers::pi_v<T> * instantaneous_freq(spec, t) * t);
      break;
    case SignalKind::constant:
      x = spec.constant_value;
      break;
    case SignalKind::custom_table:
      x = detail::table_value(spec.table, t);
      break;
  }
  const T n = spec.noise_std > T(0)
                  ? spec.noise_std * counter_normal<T>(spec.seed, detail::noise_counter(spec, t, k))
                  : T(0);
  return {t, x, n, x + n};
}

/// n samples at t_k = k dt, k = 0..n-1.  The explicit seed overrides the one
/// stored in the spec.
template <std::floating_point T>
[[nodiscard]] std::vector<SignalSample<T>> sample_path(const SignalSpec<T>& spec, T dt, std::size_t n,
                                                       std::uint64_t seed) {
  if (!(dt > T(0))) throw std::invalid_argument("sample_path: dt must be positive");
  if (n < 1) throw std::invalid_argument("sample_path: need at least one sample");
  SignalSpec<T> s = spec;
  s.seed = seed;
  std::vector<SignalSample<T>> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(sample(s, static_cast<T>(k) * dt, k));
  return out;
}

/// Reads a two-column (t, value) table, one sample per line, whitespace
/// separated.  Blank lines and lines starting with '#' are skipped.  Times
/// must be strictly increasing.
template <std::floating_point T = double>
[[nodiscard]] std::vector<std::array<T, 2>> load_signal_table(std::istream& in) {
  std::vector<std::array<T, 2>> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double t{}, v{};
    if (!(row >> t >> v))
      throw std::invalid_argument("signal table: malformed line " + std::to_string(line_no));
    if (!table.empty() && static_cast<T>(t) <= table.back()[0])
      throw std::invalid_argument("signal table: times must be strictly increasing (line " +
                                  std::to_string(line_no) + ")");
    table.push_back({static_cast<T>(t), static_cast<T>(v)});
  }
  if (table.empty()) throw std::invalid_argument("signal table: no samples");
  return table;
}

}  // namespace canfilt
