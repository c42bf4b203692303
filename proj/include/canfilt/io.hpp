#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "canfilt/metrics.hpp"
#include "canfilt/sim.hpp"

namespace canfilt {

enum class ExportFormat { csv, json };

// --- enum <-> interface token maps -----------------------------------------

[[nodiscard]] inline std::string to_token(DriftSign s) { return s == DriftSign::minus_jh ? "eq9" : "sec3"; }
[[nodiscard]] inline std::string to_token(GradMode g) { return g == GradMode::closed_form ? "closed" : "fd"; }
[[nodiscard]] inline std::string to_token(ProjMode p) {
  return p == ProjMode::project_update ? "update" : "gradient";
}
[[nodiscard]] inline std::string to_token(SignalKind k) {
  switch (k) {
    case SignalKind::fm_sine: return "fm_sine";
    case SignalKind::constant: return "constant";
    case SignalKind::custom_table: return "custom_table";
  }
  return "fm_sine";
}

[[nodiscard]] inline DriftSign parse_sign_mode(std::string_view v) {
  if (v == "eq9") return DriftSign::minus_jh;
  if (v == "sec3") return DriftSign::plus_jh;
  throw std::invalid_argument("sign_mode must be eq9 or sec3");
}
[[nodiscard]] inline GradMode parse_grad_mode(std::string_view v) {
  if (v == "closed") return GradMode::closed_form;
  if (v == "fd") return GradMode::finite_difference;
  throw std::invalid_argument("grad_mode must be closed or fd");
}
[[nodiscard]] inline ProjMode parse_proj_mode(std::string_view v) {
  if (v == "update") return ProjMode::project_update;
  if (v == "gradient") return ProjMode::project_gradient;
  throw std::invalid_argument("proj_mode must be update or gradient");
}
[[nodiscard]] inline SignalKind parse_signal_kind(std::string_view v) {
  if (v == "fm_sine") return SignalKind::fm_sine;
  if (v == "constant") return SignalKind::constant;
  if (v == "custom_table") return SignalKind::custom_table;
  throw std::invalid_argument("kind must be fm_sine, constant, or custom_table");
}

// --- CSV --------------------------------------------------------------------

namespace detail {

/// 17 significant digits: lossless double round trip.
[[nodiscard]] inline std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline constexpr std::string_view kRecordCsvHeader = "t,y1,y2,u,r,e,V,lambda_min_H,h11,h12,h22";

inline void write_record_csv(const RunRecord<double>& rec, std::ostream& out) {
  out << kRecordCsvHeader << '\n';
  for (std::size_t k = 0; k < rec.rows(); ++k) {
    out << detail::full_precision(rec.t[k]) << ',' << detail::full_precision(rec.y1[k]) << ','
        << detail::full_precision(rec.y2[k]) << ',' << detail::full_precision(rec.u[k]) << ','
        << detail::full_precision(rec.r[k]) << ',' << detail::full_precision(rec.e[k]) << ','
        << detail::full_precision(rec.V[k]) << ',' << detail::full_precision(rec.lambda_min_h[k]) << ','
        << detail::full_precision(rec.h11[k]) << ',' << detail::full_precision(rec.h12[k]) << ','
        << detail::full_precision(rec.h22[k]) << '\n';
  }
}

inline void write_record_csv(const RunRecord<double>& rec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_record_csv(rec, out);
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

[[nodiscard]] inline RunRecord<double> read_record_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("record csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordCsvHeader) throw std::runtime_error("record csv: unexpected header '" + line + "'");
  RunRecord<double> rec;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double v[11];
    std::string cell;
    for (int i = 0; i < 11; ++i) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("record csv: short row");
      v[i] = std::stod(cell);
    }
    rec.t.push_back(v[0]);
    rec.y1.push_back(v[1]);
    rec.y2.push_back(v[2]);
    rec.u.push_back(v[3]);
    rec.r.push_back(v[4]);
    rec.e.push_back(v[5]);
    rec.V.push_back(v[6]);
    rec.lambda_min_h.push_back(v[7]);
    rec.h11.push_back(v[8]);
    rec.h12.push_back(v[9]);
    rec.h22.push_back(v[10]);
  }
  if (!rec.empty()) {
    rec.final_H = rec.hamiltonian_at(rec.rows() - 1);
    rec.steps = rec.rows() - 1;
    if (rec.rows() > 1) rec.dt = rec.t[1] - rec.t[0];
  }
  return rec;
}

[[nodiscard]] inline RunRecord<double> read_record_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return read_record_csv(in);
}

// --- JSON -------------------------------------------------------------------

[[nodiscard]] inline nlohmann::json to_json(const StabilityIndicators<double>& ind) {
  return {{"dt", ind.dt},   {"N", ind.N},         {"Y_max", ind.Y_max},
          {"lambda_min", ind.lambda_min}, {"E_rms", ind.E_rms}, {"E_max", ind.E_max}};
}

[[nodiscard]] inline nlohmann::json to_json(const FilterConfig& cfg) {
  return {{"T", cfg.T},
          {"dt", cfg.dt},
          {"alpha", cfg.alpha},
          {"y0", {cfg.y0.x, cfg.y0.y}},
          {"H0", {{"h11", cfg.H0.h11}, {"h12", cfg.H0.h12}, {"h22", cfg.H0.h22}}},
          {"C", {cfg.sys.C.x, cfg.sys.C.y}},
          {"B", {cfg.sys.B.x, cfg.sys.B.y}},
          {"seed", cfg.seed},
          {"sign_mode", to_token(cfg.sign_mode)},
          {"grad_mode", to_token(cfg.grad_mode)},
          {"proj_mode", to_token(cfg.proj_mode)},
          {"fd_epsilon", cfg.fd_epsilon},
          {"z", cfg.z},
          {"signal",
           {{"kind", to_token(cfg.signal.kind)},
            {"base_freq", cfg.signal.base_freq},
            {"mod_amp", cfg.signal.mod_amp},
            {"mod_freq_factor", cfg.signal.mod_freq_factor},
            {"constant_value", cfg.signal.constant_value},
            {"noise_std", cfg.signal.noise_std},
            {"shared_noise", cfg.signal.shared_noise},
            {"table_path", cfg.signal.table_path}}}};
}

/// Config echo + indicators + final Hamiltonian.
[[nodiscard]] inline nlohmann::json record_summary_json(const RunRecord<double>& rec, const FilterConfig& cfg) {
  nlohmann::json j;
  j["config"] = to_json(cfg);
  j["indicators"] = rec.rows() >= 2 ? to_json(compute_indicators(rec)) : nlohmann::json(nullptr);
  j["final_H"] = {{"h11", rec.final_H.h11}, {"h12", rec.final_H.h12}, {"h22", rec.final_H.h22}};
  j["safeguard"] = {{"count", rec.safeguard_count}, {"max_delta", rec.safeguard_max_delta}};
  return j;
}

inline void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

// --- refinement table --------------------------------------------------------

[[nodiscard]] inline std::string format_study_table(const std::vector<StabilityIndicators<double>>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%10s %8s %12s %12s %12s %12s\n", "dt", "N", "Y_max", "lambda_min",
                "E_rms", "E_max");
  out << line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%10.4f %8zu %12.6f %12.6f %12.6f %12.6f\n", row.dt, row.N, row.Y_max,
                  row.lambda_min, row.E_rms, row.E_max);
    out << line;
  }
  return out.str();
}

[[nodiscard]] inline nlohmann::json to_json(const std::vector<StabilityIndicators<double>>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) arr.push_back(to_json(row));
  return arr;
}

[[nodiscard]] inline std::string study_table_csv(const std::vector<StabilityIndicators<double>>& rows) {
  std::ostringstream out;
  out << "dt,N,Y_max,lambda_min,E_rms,E_max\n";
  for (const auto& row : rows) {
    out << detail::full_precision(row.dt) << ',' << row.N << ',' << detail::full_precision(row.Y_max) << ','
        << detail::full_precision(row.lambda_min) << ',' << detail::full_precision(row.E_rms) << ','
        << detail::full_precision(row.E_max) << '\n';
  }
  return out.str();
}

// --- config file --------------------------------------------------------------

namespace detail {

[[nodiscard]] inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[nodiscard]] inline std::vector<double> parse_numbers(const std::string& value, std::size_t expect,
                                                       const std::string& key) {
  std::istringstream in(value);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (out.size() != expect)
    throw std::invalid_argument("config key '" + key + "' expects " + std::to_string(expect) + " value(s)");
  return out;
}

[[nodiscard]] inline bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config key '" + key + "' expects true/false");
}

}  // namespace detail

/// Applies one `key = value` assignment to a config.  Keys mirror the
/// FilterConfig / SignalSpec field names.
inline void apply_config_entry(FilterConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_numbers;
  if (key == "T") cfg.T = parse_numbers(value, 1, key)[0];
  else if (key == "dt") cfg.dt = parse_numbers(value, 1, key)[0];
  else if (key == "alpha") cfg.alpha = parse_numbers(value, 1, key)[0];
  else if (key == "y0") {
    const auto v = parse_numbers(value, 2, key);
    cfg.y0 = {v[0], v[1]};
  } else if (key == "H0") {
    const auto v = parse_numbers(value, 3, key);
    cfg.H0 = {v[0], v[1], v[2]};
  } else if (key == "C") {
    const auto v = parse_numbers(value, 2, key);
    cfg.sys.C = {v[0], v[1]};
  } else if (key == "B") {
    const auto v = parse_numbers(value, 2, key);
    cfg.sys.B = {v[0], v[1]};
  } else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
  else if (key == "sign_mode") cfg.sign_mode = parse_sign_mode(value);
  else if (key == "grad_mode") cfg.grad_mode = parse_grad_mode(value);
  else if (key == "proj_mode") cfg.proj_mode = parse_proj_mode(value);
  else if (key == "fd_epsilon") cfg.fd_epsilon = parse_numbers(value, 1, key)[0];
  else if (key == "z") cfg.z = parse_numbers(value, 1, key)[0];
  else if (key == "kind") cfg.signal.kind = parse_signal_kind(value);
  else if (key == "base_freq") cfg.signal.base_freq = parse_numbers(value, 1, key)[0];
  else if (key == "mod_amp") cfg.signal.mod_amp = parse_numbers(value, 1, key)[0];
  else if (key == "mod_freq_factor") cfg.signal.mod_freq_factor = parse_numbers(value, 1, key)[0];
  else if (key == "constant_value") cfg.signal.constant_value = parse_numbers(value, 1, key)[0];
  else if (key == "noise_std") cfg.signal.noise_std = parse_numbers(value, 1, key)[0];
  else if (key == "shared_noise") cfg.signal.shared_noise = parse_bool(value, key);
  else if (key == "table_path") {
    cfg.signal.table_path = value;
    std::ifstream table(value);
    if (!table) throw std::invalid_argument("config: cannot open signal table '" + value + "'");
    cfg.signal.table = load_signal_table<double>(table);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

/// Flat `key = value` config file; '#' starts a comment.
[[nodiscard]] inline FilterConfig parse_config(std::istream& in, FilterConfig base = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key or value");
    apply_config_entry(base, key, value);
  }
  return base;
}

[[nodiscard]] inline FilterConfig parse_config_file(const std::string& path, FilterConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(in, base);
}

}  // namespace canfilt
