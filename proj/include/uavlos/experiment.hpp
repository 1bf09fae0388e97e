#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uavlos/assoc.hpp"
#include "uavlos/env.hpp"
#include "uavlos/types.hpp"

namespace uavlos {

/// Invalid or incomplete experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid parameters of a named city type (mean building height, mean building
/// width, mean street width; meters).
struct Preset {
  std::string name;
  double mean_height;
  double mu_b;
  double mu_s;
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(std::string_view name);

enum class SweepKind { UavHeight, BuildingRatio, Velocity, Association };

std::string_view to_string(SweepKind kind);

struct UavPlacement {
  double x = 50.0;
  double y = 50.0;
  double h = 100.0;
  double d3d = 180.0;
};

struct AssociationSetup {
  std::vector<double> users_x{-150.0, -100.0, -50.0, 0.0};
  std::size_t uav_count = 4;
  double uav_height = 100.0;
  double d3d = 180.0;
  Region uav_box{-150.0, 50.0, 33.0, 150.0};
  std::size_t capacity = 1;
  bool proposed_requires_los = true;
};

struct ExperimentConfig {
  std::string preset = "urban";  // or "custom"
  double mu_b = 45.0;
  double mu_s = 13.0;
  double mean_height = 19.0;
  double sigma = 8.0;
  bool sigma_from_mean_height = false;
  Region region = Region::centered(400.0, 400.0);

  SweepKind sweep = SweepKind::Velocity;
  std::vector<double> values;

  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  double epsilon = 1e-3;
  double speed = 15.0;  // m/s, unless swept
  double epoch = 10.0;  // s

  UavPlacement uav;
  // When set, the UAV sits at this 3D distance from the user's start, at
  // azimuth_deg counterclockwise from +X; the horizontal offset follows the
  // UAV height. Required by the height sweep.
  std::optional<double> initial_distance;
  double azimuth_deg = 45.0;

  std::vector<double> street_widths{10.0, 20.0};  // building-ratio sweep
  AssociationSetup association;

  bool timing = false;  // adds a runtime_ms column
  unsigned threads = 0;
  std::string out;

  /// Height parameter actually used for sampling and the analytic model.
  double effective_sigma() const;
  GridParams grid_params() const;
  /// UAV for a given height, honoring initial_distance when set.
  Uav uav_at_height(double h) const;
};

/// Parses a JSON document. Unknown keys and out-of-range values raise
/// ConfigError before any computation.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON of the normalized config (stable key order).
std::string canonical_json(const ExperimentConfig& config);

/// 64-bit FNV-1a of canonical_json, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Runs the configured sweep and writes the CSV (header comments plus one
/// row per sweep point and series). `trial_log` receives per-trial JSON lines.
void run_experiment(const ExperimentConfig& config, std::ostream& csv,
                    std::ostream* trial_log = nullptr);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Cross-module oracle suites: "quadrature", "mc-agreement", "assoc", "all".
std::vector<CheckResult> run_validation(std::string_view suite, const ExperimentConfig& config);
bool is_validation_suite(std::string_view suite);

/// JSON document of one sampled city.
std::string grid_json(const UrbanGrid& grid, const GridParams& params, std::uint64_t seed);

}  // namespace uavlos
