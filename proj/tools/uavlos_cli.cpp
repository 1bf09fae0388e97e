// Command-line front end: run sweeps, validation suites and grid dumps.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "uavlos/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kConfigError = 2;

constexpr const char* kDefaultConfig = R"({"sweep": {"kind": "velocity", "values": [15]}})";

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out;
};

uavlos::ExperimentConfig resolve(const Common& o, bool config_required) {
  if (config_required && o.config_path.empty()) throw uavlos::ConfigError("--config is required");
  uavlos::ExperimentConfig c =
      o.config_path.empty() ? uavlos::parse_config(kDefaultConfig) : uavlos::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.trials) {
    if (*o.trials < 1) throw uavlos::ConfigError("--trials must be at least 1");
    c.trials = *o.trials;
  }
  if (!o.out.empty()) c.out = o.out;
  return c;
}

// Opens the output before any computation so a bad path fails fast.
std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  if (path.empty() || path == "-") return nullptr;
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw uavlos::ConfigError("cannot write '" + path + "'");
  return f;
}

void add_common(CLI::App* cmd, Common& o, bool with_trials) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  if (with_trials) cmd->add_option("--trials", o.trials, "Monte Carlo trials (overrides the config)");
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected line-of-sight time between mobile ground users and UAVs"};
  app.require_subcommand(1);

  Common run_opts;
  std::string trial_log_path;
  CLI::App* run = app.add_subcommand("run", "Run the configured sweep and write CSV");
  add_common(run, run_opts, true);
  run->add_option("--trial-log", trial_log_path, "Write per-trial JSON lines here");

  Common val_opts;
  std::string suite;
  CLI::App* validate = app.add_subcommand("validate", "Run an oracle suite: quadrature, mc-agreement, assoc, all");
  validate->add_option("suite", suite, "Suite name")->required();
  add_common(validate, val_opts, true);

  Common grid_opts;
  CLI::App* grid = app.add_subcommand("grid", "Grid utilities");
  CLI::App* dump = grid->add_subcommand("dump", "Sample one city and write it as JSON");
  grid->require_subcommand(1);
  add_common(dump, grid_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      const uavlos::ExperimentConfig c = resolve(run_opts, true);
      auto out = open_output(c.out);
      auto log = open_output(trial_log_path);
      uavlos::run_experiment(c, out ? *out : std::cout, log.get());
      return kOk;
    }
    if (*validate) {
      if (!uavlos::is_validation_suite(suite)) {
        throw uavlos::ConfigError("unknown suite '" + suite + "' (quadrature, mc-agreement, assoc, all)");
      }
      const uavlos::ExperimentConfig c = resolve(val_opts, false);
      auto out = open_output(c.out);
      std::ostream& os = out ? *out : std::cout;
      bool passed = true;
      for (const uavlos::CheckResult& r : uavlos::run_validation(suite, c)) {
        nlohmann::json line{{"suite", suite}, {"check", r.name}, {"passed", r.passed}, {"detail", r.detail}};
        os << line.dump() << "\n";
        passed = passed && r.passed;
      }
      os << nlohmann::json{{"suite", suite}, {"passed", passed}}.dump() << "\n";
      return passed ? kOk : kValidationFailed;
    }
    if (*dump) {
      const uavlos::ExperimentConfig c = resolve(grid_opts, false);
      auto out = open_output(c.out);
      const uavlos::GridParams params = c.grid_params();
      const uavlos::UrbanGrid g = uavlos::sample_grid(params, c.seed);
      (out ? *out : std::cout) << uavlos::grid_json(g, params, c.seed) << "\n";
      return kOk;
    }
  } catch (const uavlos::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
