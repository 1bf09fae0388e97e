#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uavlos/coverage.hpp"
#include "uavlos/env.hpp"

namespace uavlos {

struct Interval {
  double start;
  double end;

  double length() const { return end - start; }
};

/// Realized LoS periods of one trajectory inside its coverage window.
struct LosIntervalSet {
  std::vector<Interval> intervals;  // disjoint, sorted
  double total = 0.0;
  CoverageWindow window;
};

struct TrialStats {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(trials)
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Exact LoS test for a ground user at g. A building blocks when the
/// projected link meets its closed footprint at a point where the link is no
/// higher than the roof. Throws GeometryError for g inside a building.
bool is_los(const UrbanGrid& grid, Vec2 g, const Uav& u);

/// Time interval, within [t0, t1], during which one building blocks the link
/// of a user moving along +X. Empty optional when it never blocks.
std::optional<Interval> blocking_interval(const Rect& footprint, double height,
                                          const UserMotion& motion, const Uav& u, double t0,
                                          double t1);

/// Realized LoS intervals over the coverage window: the window minus the
/// union of per-building blocking intervals, for every building whose
/// footprint meets the triangle swept by the link.
LosIntervalSet los_time(const UrbanGrid& grid, const UserMotion& motion, const Uav& u);

/// Dense-sampling reference: LoS state checked every dt seconds.
double los_time_sampled(const UrbanGrid& grid, const UserMotion& motion, const Uav& u, double dt);

struct McOptions {
  double street_width = 10.0;       // user's street, anchored at motion.start.y
  unsigned threads = 0;             // 0: hardware concurrency
  std::ostream* trial_log = nullptr;  // JSON lines per trial
  std::string log_fields;             // extra "key":value, pairs put first on every line
};

/// Averages los_time over independently seeded cities. Trial i uses
/// trial_seed(seed, i), so results do not depend on the thread count.
TrialStats monte_carlo_expected_los(const GridParams& params, const UserMotion& motion,
                                    const Uav& u, std::uint64_t trials, std::uint64_t seed,
                                    const McOptions& options = {});

/// Fraction of sampled cities in which the user at g sees the UAV, next to
/// the mean of the static analytic probability evaluated at each city's
/// realized first blocking side.
struct StaticAgreement {
  double los_fraction = 0.0;
  double binomial_stderr = 0.0;
  double mean_conditional_p = 0.0;
  std::uint64_t trials = 0;
};
StaticAgreement monte_carlo_static_los(const GridParams& params, Vec2 g, const Uav& u,
                                       double street_width, std::uint64_t trials,
                                       std::uint64_t seed);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::uint64_t n, unsigned threads, const std::function<void(std::uint64_t)>& fn);

}  // namespace uavlos
