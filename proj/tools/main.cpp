// canfilt command-line harness: run a single simulation, sweep the time step,
// run the numerical property suite, or recompute indicators from a stored
// record.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "canfilt/io.hpp"
#include "canfilt/sim.hpp"
#include "canfilt/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitNumericalAbort = 2;
constexpr int kExitVerifyFailure = 3;

struct CommonFlags {
  std::string config_path;
  double dt{};
  double T{};
  double alpha{};
  std::uint64_t seed{};
  std::string sign_mode;
  std::string grad_mode;
  std::string proj_mode;
  bool shared_noise{false};

  CLI::App* app{};

  void attach(CLI::App& cmd) {
    app = &cmd;
    cmd.add_option("--config", config_path, "key = value config file");
    cmd.add_option("--dt", dt, "time step");
    cmd.add_option("--T", T, "total duration");
    cmd.add_option("--alpha", alpha, "learning rate");
    cmd.add_option("--seed", seed, "noise seed");
    cmd.add_option("--sign-mode", sign_mode, "drift sign convention")
        ->check(CLI::IsMember({"eq9", "sec3"}));
    cmd.add_option("--grad-mode", grad_mode, "gradient mode")->check(CLI::IsMember({"closed", "fd"}));
    cmd.add_option("--proj-mode", proj_mode, "projection placement")
        ->check(CLI::IsMember({"update", "gradient"}));
    cmd.add_flag("--shared-noise", shared_noise, "index noise by time instead of step");
  }

  [[nodiscard]] canfilt::FilterConfig build() const {
    canfilt::FilterConfig cfg;
    if (!config_path.empty()) cfg = canfilt::parse_config_file(config_path, cfg);
    if (app->count("--dt")) cfg.dt = dt;
    if (app->count("--T")) cfg.T = T;
    if (app->count("--alpha")) cfg.alpha = alpha;
    if (app->count("--seed")) cfg.seed = seed;
    if (app->count("--sign-mode")) cfg.sign_mode = canfilt::parse_sign_mode(sign_mode);
    if (app->count("--grad-mode")) cfg.grad_mode = canfilt::parse_grad_mode(grad_mode);
    if (app->count("--proj-mode")) cfg.proj_mode = canfilt::parse_proj_mode(proj_mode);
    if (app->count("--shared-noise")) cfg.signal.shared_noise = shared_noise;
    if (cfg.z != 1.0)
      std::cerr << "warning: z = " << cfg.z << " is recorded as metadata only; the dynamics ignore it\n";
    return cfg;
  }
};

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    canfilt::write_text(text, path);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive Hamiltonian filter"};
  app.require_subcommand(1);

  CommonFlags run_flags, refine_flags;
  std::string out_path, format = "csv", refine_format = "table", in_path, dt_list_arg, select_arg = "all";

  CLI::App* run_cmd = app.add_subcommand("run", "run one simulation and export the record");
  run_flags.attach(*run_cmd);
  run_cmd->add_option("--out", out_path, "output path (stdout if omitted)");
  run_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* refine_cmd = app.add_subcommand("refine", "time-step refinement study");
  refine_flags.attach(*refine_cmd);
  refine_cmd->add_option("--dt-list", dt_list_arg, "comma-separated dt values (default 0.02,0.01,0.005,0.0025)");
  refine_cmd->add_option("--out", out_path, "output path (stdout if omitted)");
  refine_cmd->add_option("--format", refine_format, "table, csv, or json")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the numerical property suite");
  verify_cmd->add_option("--select", select_arg,
                         "all, none, or comma-separated check names (eigenvalue_derivative, "
                         "projection_optimality, transition_identities, gronwall_bound, "
                         "sensitivity_bound, psd_invariance)");

  CLI::App* export_cmd = app.add_subcommand("export", "recompute indicators from a stored record");
  export_cmd->add_option("--in", in_path, "record csv produced by run")->required();
  export_cmd->add_option("--out", out_path, "output path (stdout if omitted)");
  export_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      const canfilt::FilterConfig cfg = run_flags.build();
      const canfilt::RunRecord<double> rec = canfilt::run_simulation(cfg);
      if (format == "json") {
        write_output(canfilt::record_summary_json(rec, cfg).dump(2) + "\n", out_path);
      } else {
        if (out_path.empty()) {
          canfilt::write_record_csv(rec, std::cout);
        } else {
          canfilt::write_record_csv(rec, out_path);
        }
      }
      return kExitOk;
    }

    if (refine_cmd->parsed()) {
      canfilt::StudySpec study;
      study.base = refine_flags.build();
      if (!dt_list_arg.empty()) {
        study.dt_list.clear();
        std::istringstream in(dt_list_arg);
        std::string item;
        while (std::getline(in, item, ',')) study.dt_list.push_back(std::stod(item));
      }
      const auto rows = canfilt::run_refinement_study(study);
      if (refine_format == "json") {
        write_output(canfilt::to_json(rows).dump(2) + "\n", out_path);
      } else if (refine_format == "csv") {
        write_output(canfilt::study_table_csv(rows), out_path);
      } else {
        write_output(canfilt::format_study_table(rows), out_path);
      }
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      std::vector<std::string> selection;
      std::istringstream in(select_arg);
      std::string item;
      while (std::getline(in, item, ',')) {
        if (!item.empty()) selection.push_back(item);
      }
      const auto reports = canfilt::verify::run_suite(selection);
      for (const auto& r : reports) std::cout << canfilt::verify::to_json(r).dump() << "\n";
      return canfilt::verify::all_passed(reports) ? kExitOk : kExitVerifyFailure;
    }

    if (export_cmd->parsed()) {
      const canfilt::RunRecord<double> rec = canfilt::read_record_csv(in_path);
      if (format == "json") {
        nlohmann::json j;
        j["indicators"] = rec.rows() >= 2 ? canfilt::to_json(canfilt::compute_indicators(rec))
                                          : nlohmann::json(nullptr);
        j["final_H"] = {{"h11", rec.final_H.h11}, {"h12", rec.final_H.h12}, {"h22", rec.final_H.h22}};
        write_output(j.dump(2) + "\n", out_path);
      } else {
        if (out_path.empty()) {
          canfilt::write_record_csv(rec, std::cout);
        } else {
          canfilt::write_record_csv(rec, out_path);
        }
      }
      return kExitOk;
    }
  } catch (const canfilt::numerical_error& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumericalAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
