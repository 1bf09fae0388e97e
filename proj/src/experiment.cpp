#include "uavlos/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uavlos/mobility.hpp"
#include "uavlos/oracle.hpp"

namespace uavlos {
namespace {

using nlohmann::json;

const std::set<std::string> kTopKeys{
    "preset",  "mu_b",   "mu_s",    "mean_height", "sigma",  "sigma_from_mean_height",
    "region",  "sweep",  "trials",  "seed",        "epsilon", "speed",
    "epoch",   "uav",    "initial_distance",       "azimuth_deg", "street_widths",
    "association",       "timing",  "threads",     "out"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("'" + key + "' must be finite");
  return v;
}

double positive(const json& j, const std::string& key) {
  const double v = number(j, key);
  if (!(v > 0.0)) throw ConfigError("'" + key + "' must be positive");
  return v;
}

std::uint64_t count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

bool flag(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return j.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError("'" + key + "' must be a nonempty array");
  std::vector<double> out;
  for (const json& e : j) out.push_back(number(e, key));
  return out;
}

SweepKind sweep_kind(const std::string& name) {
  if (name == "uav_height") return SweepKind::UavHeight;
  if (name == "building_ratio") return SweepKind::BuildingRatio;
  if (name == "velocity") return SweepKind::Velocity;
  if (name == "association") return SweepKind::Association;
  throw ConfigError("unknown sweep kind '" + name + "'");
}

// Fixed-point-free formatting that round-trips and is stable across runs.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void check_geometry(const ExperimentConfig& c) {
  const double street = c.sweep == SweepKind::BuildingRatio
                            ? *std::max_element(c.street_widths.begin(), c.street_widths.end())
                            : c.mu_s;
  if (c.sweep == SweepKind::Association) {
    if (!(c.association.uav_box.y_min > street)) {
      throw ConfigError("association UAV box must lie beyond the far street edge");
    }
    return;
  }
  std::vector<double> heights{c.uav.h};
  if (c.sweep == SweepKind::UavHeight) heights = c.values;
  for (double h : heights) {
    if (c.initial_distance && !(*c.initial_distance > h)) {
      throw ConfigError("initial_distance must exceed every UAV height");
    }
    const Uav u = c.uav_at_height(h);
    if (!(u.y > street)) {
      throw ConfigError("UAV must lie beyond the far edge of the user's street (y > " +
                        fmt(street) + ")");
    }
  }
}

void write_header(const ExperimentConfig& c, std::ostream& csv) {
  csv << "# uavlos results v1 config_hash=" << config_hash(c) << " sweep=" << to_string(c.sweep)
      << " preset=" << c.preset << "\n";
  csv << "# sigma=" << fmt(c.effective_sigma()) << " region=" << fmt(c.region.width()) << "x"
      << fmt(c.region.height()) << " epoch=" << fmt(c.epoch) << " epsilon=" << fmt(c.epsilon)
      << " seed=" << c.seed;
  if (c.sweep != SweepKind::Velocity && c.sweep != SweepKind::Association) {
    csv << " speed=" << fmt(c.speed);
  }
  if (c.sweep == SweepKind::Association) {
    const AssociationSetup& a = c.association;
    csv << " uav_height=" << fmt(a.uav_height) << " d3d=" << fmt(a.d3d)
        << " uav_count=" << a.uav_count << " capacity=" << a.capacity;
  } else if (c.initial_distance) {
    csv << " initial_distance_3d=" << fmt(*c.initial_distance)
        << " azimuth_deg=" << fmt(c.azimuth_deg) << " d3d=" << fmt(c.uav.d3d);
    if (c.sweep != SweepKind::UavHeight) csv << " uav_height=" << fmt(c.uav.h);
  } else {
    csv << " uav=" << fmt(c.uav.x) << ":" << fmt(c.uav.y) << ":" << fmt(c.uav.h)
        << " d3d=" << fmt(c.uav.d3d);
  }
  csv << "\n";
}

std::string log_fields(std::size_t row, double value, const std::string& series) {
  return "\"row\":" + std::to_string(row) + ",\"sweep_value\":" + fmt(value) + ",\"series\":\"" +
         series + "\",";
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table{
      {"suburban", 10.0, 37.0, 10.0},
      {"urban", 19.0, 45.0, 13.0},
      {"dense_urban", 25.0, 60.0, 20.0},
  };
  return table;
}

std::optional<Preset> find_preset(std::string_view name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::UavHeight: return "uav_height";
    case SweepKind::BuildingRatio: return "building_ratio";
    case SweepKind::Velocity: return "velocity";
    case SweepKind::Association: return "association";
  }
  return "?";
}

double ExperimentConfig::effective_sigma() const {
  // Rayleigh mean is sigma * sqrt(pi / 2).
  if (sigma_from_mean_height) return mean_height / std::sqrt(std::numbers::pi / 2.0);
  return sigma;
}

GridParams ExperimentConfig::grid_params() const {
  return GridParams::make(mu_b, mu_s, effective_sigma(), region);
}

Uav ExperimentConfig::uav_at_height(double h) const {
  Uav u{uav.x, uav.y, h, uav.d3d};
  if (initial_distance) {
    const double horizontal = std::sqrt(std::max(0.0, *initial_distance * *initial_distance - h * h));
    const double az = azimuth_deg * std::numbers::pi / 180.0;
    u.x = horizontal * std::cos(az);
    u.y = horizontal * std::sin(az);
  }
  return u;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, kTopKeys, "config");

  ExperimentConfig c;
  try {
    if (doc.contains("preset")) c.preset = doc["preset"].get<std::string>();
  } catch (const json::exception&) {
    throw ConfigError("'preset' must be a string");
  }
  if (auto p = find_preset(c.preset)) {
    for (const char* key : {"mu_b", "mu_s", "mean_height"}) {
      if (doc.contains(key)) {
        throw ConfigError(std::string("'") + key + "' is fixed by preset '" + c.preset +
                          "'; use preset \"custom\" to change it");
      }
    }
    c.mu_b = p->mu_b;
    c.mu_s = p->mu_s;
    c.mean_height = p->mean_height;
  } else if (c.preset == "custom") {
    if (!doc.contains("mu_b") || !doc.contains("mu_s")) {
      throw ConfigError("preset \"custom\" needs mu_b and mu_s");
    }
    c.mu_b = positive(doc["mu_b"], "mu_b");
    c.mu_s = positive(doc["mu_s"], "mu_s");
    if (doc.contains("mean_height")) c.mean_height = positive(doc["mean_height"], "mean_height");
  } else {
    throw ConfigError("unknown preset '" + c.preset + "'");
  }

  if (doc.contains("sigma")) c.sigma = positive(doc["sigma"], "sigma");
  if (doc.contains("sigma_from_mean_height")) {
    c.sigma_from_mean_height = flag(doc["sigma_from_mean_height"], "sigma_from_mean_height");
  }
  if (doc.contains("region")) {
    const json& r = doc["region"];
    if (!r.is_object()) throw ConfigError("'region' must be an object");
    reject_unknown(r, {"width", "height"}, "region");
    const double w = r.contains("width") ? positive(r["width"], "region.width") : 400.0;
    const double h = r.contains("height") ? positive(r["height"], "region.height") : 400.0;
    c.region = Region::centered(w, h);
  }

  if (!doc.contains("sweep")) throw ConfigError("'sweep' is required");
  const json& sweep = doc["sweep"];
  if (!sweep.is_object()) throw ConfigError("'sweep' must be an object");
  reject_unknown(sweep, {"kind", "values"}, "sweep");
  if (!sweep.contains("kind") || !sweep["kind"].is_string()) {
    throw ConfigError("'sweep.kind' must be a string");
  }
  c.sweep = sweep_kind(sweep["kind"].get<std::string>());
  if (!sweep.contains("values")) throw ConfigError("'sweep.values' is required");
  c.values = numbers(sweep["values"], "sweep.values");
  std::sort(c.values.begin(), c.values.end());
  if (std::adjacent_find(c.values.begin(), c.values.end()) != c.values.end()) {
    throw ConfigError("'sweep.values' contains duplicates");
  }
  const double lowest = c.values.front();
  if (c.sweep == SweepKind::Velocity || c.sweep == SweepKind::Association) {
    if (lowest < 0.0) throw ConfigError("speeds must be nonnegative");
  } else if (!(lowest > 0.0)) {
    throw ConfigError("sweep values must be positive");
  }

  if (doc.contains("trials")) c.trials = count(doc["trials"], "trials");
  if (c.trials < 1) throw ConfigError("'trials' must be at least 1");
  if (doc.contains("seed")) c.seed = count(doc["seed"], "seed");
  if (doc.contains("epsilon")) {
    c.epsilon = number(doc["epsilon"], "epsilon");
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("'epsilon' must lie in (0, 1)");
  }
  if (doc.contains("speed")) {
    c.speed = number(doc["speed"], "speed");
    if (c.speed < 0.0) throw ConfigError("'speed' must be nonnegative");
  }
  if (doc.contains("epoch")) c.epoch = positive(doc["epoch"], "epoch");

  if (doc.contains("uav")) {
    const json& u = doc["uav"];
    if (!u.is_object()) throw ConfigError("'uav' must be an object");
    reject_unknown(u, {"x", "y", "h", "d3d"}, "uav");
    if (u.contains("x")) c.uav.x = number(u["x"], "uav.x");
    if (u.contains("y")) c.uav.y = number(u["y"], "uav.y");
    if (u.contains("h")) c.uav.h = positive(u["h"], "uav.h");
    if (u.contains("d3d")) c.uav.d3d = positive(u["d3d"], "uav.d3d");
  }
  if (doc.contains("initial_distance")) {
    c.initial_distance = positive(doc["initial_distance"], "initial_distance");
  }
  if (doc.contains("azimuth_deg")) {
    c.azimuth_deg = number(doc["azimuth_deg"], "azimuth_deg");
    if (!(c.azimuth_deg > 0.0 && c.azimuth_deg < 180.0)) {
      throw ConfigError("'azimuth_deg' must lie in (0, 180): the UAV sits in the first or second quadrant");
    }
  }
  if (c.sweep == SweepKind::UavHeight && !c.initial_distance) {
    throw ConfigError("the uav_height sweep needs 'initial_distance' (3D meters)");
  }
  if (doc.contains("street_widths")) {
    c.street_widths = numbers(doc["street_widths"], "street_widths");
    for (double w : c.street_widths) {
      if (!(w > 0.0)) throw ConfigError("street widths must be positive");
    }
  }

  if (doc.contains("association")) {
    const json& a = doc["association"];
    if (!a.is_object()) throw ConfigError("'association' must be an object");
    reject_unknown(a, {"users_x", "uav_count", "uav_height", "d3d", "uav_box", "capacity",
                       "proposed_requires_los"},
                   "association");
    AssociationSetup& s = c.association;
    if (a.contains("users_x")) s.users_x = numbers(a["users_x"], "association.users_x");
    if (a.contains("uav_count")) s.uav_count = count(a["uav_count"], "association.uav_count");
    if (a.contains("uav_height")) s.uav_height = positive(a["uav_height"], "association.uav_height");
    if (a.contains("d3d")) s.d3d = positive(a["d3d"], "association.d3d");
    if (a.contains("capacity")) s.capacity = count(a["capacity"], "association.capacity");
    if (a.contains("proposed_requires_los")) {
      s.proposed_requires_los = flag(a["proposed_requires_los"], "association.proposed_requires_los");
    }
    if (a.contains("uav_box")) {
      const json& b = a["uav_box"];
      if (!b.is_object()) throw ConfigError("'association.uav_box' must be an object");
      reject_unknown(b, {"x_min", "x_max", "y_min", "y_max"}, "association.uav_box");
      for (const char* key : {"x_min", "x_max", "y_min", "y_max"}) {
        if (!b.contains(key)) throw ConfigError(std::string("association.uav_box needs ") + key);
      }
      s.uav_box = {number(b["x_min"], "x_min"), number(b["x_max"], "x_max"),
                   number(b["y_min"], "y_min"), number(b["y_max"], "y_max")};
      if (!(s.uav_box.x_max >= s.uav_box.x_min && s.uav_box.y_max >= s.uav_box.y_min)) {
        throw ConfigError("association.uav_box is inverted");
      }
    }
    if (s.uav_count < 1 || s.capacity < 1) throw ConfigError("association needs UAVs and capacity >= 1");
  }

  if (doc.contains("timing")) c.timing = flag(doc["timing"], "timing");
  if (doc.contains("threads")) c.threads = static_cast<unsigned>(count(doc["threads"], "threads"));
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("'out' must be a string");
    c.out = doc["out"].get<std::string>();
  }

  if (std::min(c.region.width(), c.region.height()) < c.mu_s) {
    throw ConfigError("region is narrower than one street");
  }
  check_geometry(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_json(const ExperimentConfig& c) {
  // Output-only settings (out, threads) do not affect results and are left out.
  json j;
  j["preset"] = c.preset;
  j["mu_b"] = c.mu_b;
  j["mu_s"] = c.mu_s;
  j["mean_height"] = c.mean_height;
  j["sigma"] = c.effective_sigma();
  j["region"] = {{"width", c.region.width()}, {"height", c.region.height()}};
  j["sweep"] = {{"kind", std::string(to_string(c.sweep))}, {"values", c.values}};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon;
  j["speed"] = c.speed;
  j["epoch"] = c.epoch;
  j["uav"] = {{"x", c.uav.x}, {"y", c.uav.y}, {"h", c.uav.h}, {"d3d", c.uav.d3d}};
  if (c.initial_distance) {
    j["initial_distance"] = *c.initial_distance;
    j["azimuth_deg"] = c.azimuth_deg;
  }
  j["street_widths"] = c.street_widths;
  const AssociationSetup& a = c.association;
  j["association"] = {{"users_x", a.users_x},
                      {"uav_count", a.uav_count},
                      {"uav_height", a.uav_height},
                      {"d3d", a.d3d},
                      {"capacity", a.capacity},
                      {"proposed_requires_los", a.proposed_requires_los},
                      {"uav_box",
                       {{"x_min", a.uav_box.x_min},
                        {"x_max", a.uav_box.x_max},
                        {"y_min", a.uav_box.y_min},
                        {"y_max", a.uav_box.y_max}}}};
  j["timing"] = c.timing;
  return j.dump();
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void run_experiment(const ExperimentConfig& c, std::ostream& csv, std::ostream* trial_log) {
  using clock = std::chrono::steady_clock;
  write_header(c, csv);

  if (c.sweep == SweepKind::Association) {
    csv << "sweep_value,proposed_s,benchmark_s,diff_mean_s,diff_ci_low_s,diff_ci_high_s,trials"
        << (c.timing ? ",runtime_ms" : "") << "\n";
    const AssociationSetup& a = c.association;
    for (double v : c.values) {
      const auto start = clock::now();
      AssocScenario s;
      s.params = c.grid_params();
      for (double x : a.users_x) s.users.push_back(UserMotion{{x, 0.0}, v, c.epoch});
      s.uav_count = a.uav_count;
      s.uav_height = a.uav_height;
      s.d3d = a.d3d;
      s.uav_box = a.uav_box;
      s.street_width = c.mu_s;
      s.epsilon = c.epsilon;
      s.capacity = a.capacity;
      s.proposed_requires_los = a.proposed_requires_los;
      const PairedComparison r = evaluate_policies(s, c.trials, c.seed, c.threads);
      csv << fmt(v) << "," << fmt(r.proposed_mean) << "," << fmt(r.benchmark_mean) << ","
          << fmt(r.diff_mean) << "," << fmt(r.ci_low) << "," << fmt(r.ci_high) << "," << r.trials;
      if (c.timing) {
        csv << "," << fmt(std::chrono::duration<double, std::milli>(clock::now() - start).count());
      }
      csv << "\n";
    }
    return;
  }

  csv << "sweep_value,series,analytic_s,mc_mean_s,mc_stderr_s,trials"
      << (c.timing ? ",runtime_ms" : "") << "\n";

  struct Point {
    double value;
    std::string series;
    GridParams params;
    double street_width;
    UserMotion motion;
    Uav uav;
  };
  std::vector<Point> points;
  const GridParams base = c.grid_params();
  const UserMotion fixed{{0.0, 0.0}, c.speed, c.epoch};
  for (double v : c.values) {
    switch (c.sweep) {
      case SweepKind::UavHeight:
        points.push_back({v, c.preset, base, c.mu_s, fixed, c.uav_at_height(v)});
        break;
      case SweepKind::Velocity:
        points.push_back({v, c.preset, base, c.mu_s, UserMotion{{0.0, 0.0}, v, c.epoch},
                          c.uav_at_height(c.uav.h)});
        break;
      case SweepKind::BuildingRatio:
        break;
      case SweepKind::Association:
        break;
    }
  }
  if (c.sweep == SweepKind::BuildingRatio) {
    // Series first, then ratio, so each street width reads as one curve.
    for (double w : c.street_widths) {
      for (double rho : c.values) {
        points.push_back({rho, "street_" + fmt(w) + "m",
                          GridParams::make(rho * w, w, c.effective_sigma(), c.region), w, fixed,
                          c.uav_at_height(c.uav.h)});
      }
    }
  }

  for (std::size_t k = 0; k < points.size(); ++k) {
    const Point& p = points[k];
    const auto start = clock::now();
    const ExpectedLosResult analytic =
        expected_los_total(p.params, p.motion, p.uav, p.street_width, c.epsilon);
    McOptions options;
    options.street_width = p.street_width;
    options.threads = c.threads;
    options.trial_log = trial_log;
    options.log_fields = log_fields(k, p.value, p.series);
    // Every row reuses the same seed: common random numbers keep adjacent
    // sweep points comparable.
    const TrialStats mc = monte_carlo_expected_los(p.params, p.motion, p.uav, c.trials, c.seed, options);
    csv << fmt(p.value) << "," << p.series << "," << fmt(analytic.value) << "," << fmt(mc.mean)
        << "," << fmt(mc.std_error) << "," << mc.trials;
    if (c.timing) {
      csv << "," << fmt(std::chrono::duration<double, std::milli>(clock::now() - start).count());
    }
    csv << "\n";
  }
}

std::string grid_json(const UrbanGrid& grid, const GridParams& params, std::uint64_t seed) {
  json j;
  j["version"] = 1;
  j["seed"] = seed;
  const Region& r = params.region();
  j["params"] = {{"lambda", params.lambda()},
                 {"mu_b", params.mu_b()},
                 {"mu_s", params.mu_s()},
                 {"sigma", params.sigma()},
                 {"region",
                  {{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}}}};
  j["x_points"] = grid.x_points();
  j["y_points"] = grid.y_points();
  j["street_fraction"] = grid.street_fraction();
  json rows = json::array();
  for (std::size_t i = 0; i < grid.x_cells(); ++i) {
    json row = json::array();
    for (std::size_t jj = 0; jj < grid.y_cells(); ++jj) row.push_back(grid.height(i, jj));
    rows.push_back(std::move(row));
  }
  j["block_heights"] = std::move(rows);
  return j.dump(2);
}

}  // namespace uavlos
