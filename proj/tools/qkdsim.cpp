// qkdsim: command-line driver for the double Mach-Zehnder QKD simulator.
//
//   qkdsim <drift|fringe|visibility|verify> --config FILE [--out DIR] [--seed N]
//
// Exit codes: 0 success, 1 a verify check failed, 2 configuration or I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qkdsim/config.hpp"
#include "qkdsim/csv.hpp"
#include "qkdsim/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

struct RunManifest {
  std::filesystem::path config_path;
  std::filesystem::path output_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::string experiment_name;
};

int fail(const std::string& category, const std::string& message) {
  std::string flat = message;
  for (char& c : flat) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "qkdsim: error: " << category << ": " << flat << '\n';
  return kExitConfigError;
}

qkdsim::ExperimentKind kind_for(const std::string& subcommand) {
  if (subcommand == "drift") return qkdsim::ExperimentKind::drift;
  if (subcommand == "fringe") return qkdsim::ExperimentKind::fringe;
  if (subcommand == "visibility") return qkdsim::ExperimentKind::visibility_timeseries;
  return qkdsim::ExperimentKind::verify_conditions;
}

qkdsim::Scenario load(const RunManifest& manifest, qkdsim::ExperimentKind kind) {
  std::ifstream in(manifest.config_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + manifest.config_path.string());
  std::ostringstream text;
  text << in.rdbuf();
  auto scenario = qkdsim::parse_config(text.str(), kind);
  if (manifest.seed_override) scenario.experiment.seeds = {*manifest.seed_override};
  return scenario;
}

int dispatch(const RunManifest& manifest) {
  qkdsim::Scenario scenario;
  try {
    scenario = load(manifest, kind_for(manifest.experiment_name));
  } catch (const qkdsim::ConfigError& e) {
    return fail("config", manifest.config_path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    return fail("config", e.what());
  }

  const auto kind = kind_for(manifest.experiment_name);
  if (scenario.experiment.kind != kind) {
    return fail("config", "experiment.kind is " + std::string(qkdsim::to_string(scenario.experiment.kind)) +
                              " but subcommand is " + manifest.experiment_name);
  }

  try {
    std::filesystem::create_directories(manifest.output_dir);
    const auto& out = manifest.output_dir;
    std::cerr << "qkdsim: running " << qkdsim::to_string(kind) << '\n';
    switch (kind) {
      case qkdsim::ExperimentKind::drift: {
        const auto result = qkdsim::run_drift(scenario);
        qkdsim::emit_csv(result.series, out / "drift.csv");
        qkdsim::emit_summary(result.summaries, out / "drift_summary.txt");
        break;
      }
      case qkdsim::ExperimentKind::fringe: {
        const auto result = qkdsim::run_fringe(scenario);
        qkdsim::emit_csv(result.series, out / "fringe.csv");
        qkdsim::emit_summary(result.summaries, out / "fringe_summary.txt");
        break;
      }
      case qkdsim::ExperimentKind::visibility_timeseries: {
        const auto result = qkdsim::run_visibility_timeseries(scenario);
        qkdsim::emit_csv(result.series, out / "visibility.csv");
        qkdsim::emit_summary(result.summaries, out / "visibility_summary.txt");
        break;
      }
      case qkdsim::ExperimentKind::verify_conditions: {
        const auto report = qkdsim::run_verify_conditions(scenario);
        qkdsim::write_text_file(out / "verify_report.txt", qkdsim::format_report(report));
        std::cerr << qkdsim::format_report(report);
        if (!report.all_passed()) return kExitCheckFailed;
        break;
      }
    }
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  } catch (const std::exception& e) {
    return fail("io", e.what());
  }
  std::cerr << "qkdsim: wrote results to " << manifest.output_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jones-calculus simulator of a double unbalanced Mach-Zehnder QKD link"};
  app.require_subcommand(1);

  RunManifest manifest;
  std::uint64_t seed = 0;
  for (const char* name : {"drift", "fringe", "visibility", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", manifest.config_path, "Scenario file (INI)")->required();
    sub->add_option("--out", manifest.output_dir, "Output directory");
    sub->add_option("--seed", seed, "Replace the configured seed list with a single seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what());
  }

  const auto* chosen = app.get_subcommands().front();
  manifest.experiment_name = chosen->get_name();
  if (chosen->count("--seed") > 0) manifest.seed_override = seed;
  return dispatch(manifest);
}
