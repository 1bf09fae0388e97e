#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "uavlos/env.hpp"
#include "uavlos/mobility.hpp"

namespace uavlos {

enum class Policy { Proposed, Benchmark };

using ScoreMatrix = std::vector<std::vector<double>>;  // [user][uav]
using Eligibility = std::vector<std::vector<char>>;    // [user][uav], nonzero = allowed

struct GreedyRound {
  std::size_t user;
  std::size_t uav;
  double score;
};

/// Users mapped to UAVs. Each user appears once; no UAV serves more than
/// `capacity` users.
struct Assignment {
  std::vector<std::optional<std::size_t>> uav_of_user;
  std::vector<GreedyRound> rounds;  // selection order
  Policy policy = Policy::Proposed;
  std::size_t capacity = 1;
};

/// Repeatedly takes the highest remaining score (ties: lower user, then
/// lower UAV) until no positive score is left.
Assignment greedy_max(const ScoreMatrix& scores, std::size_t capacity, Policy policy);

/// Expected LoS time of every user-UAV pair over the pair's coverage window.
ScoreMatrix expected_los_scores(const std::vector<UserMotion>& users, const std::vector<Uav>& uavs,
                                const GridParams& params, double street_width,
                                double epsilon = kDefaultEpsilon);

/// Mobility-aware policy: greedy on expected LoS time. Pairs outside
/// `eligible` (when given) score zero.
Assignment assign_proposed(const std::vector<UserMotion>& users, const std::vector<Uav>& uavs,
                           const GridParams& params, double street_width,
                           double epsilon = kDefaultEpsilon, std::size_t capacity = 1,
                           const Eligibility* eligible = nullptr);

/// Pairs in range whose link is clear at t = 0 in the realized city.
Eligibility los_at_start(const std::vector<UserMotion>& users, const std::vector<Uav>& uavs,
                         const UrbanGrid& grid);

/// Nearest-LoS policy: among pairs in range and in LoS at t = 0, closest 3D
/// distance first (ties: lower user, then lower UAV).
Assignment assign_benchmark(const std::vector<UserMotion>& users, const std::vector<Uav>& uavs,
                            const UrbanGrid& grid, std::size_t capacity = 1);

/// Realized LoS seconds summed over assigned users.
double realized_los_total(const Assignment& assignment, const UrbanGrid& grid,
                          const std::vector<UserMotion>& users, const std::vector<Uav>& uavs);

/// Users on a shared X-parallel street, UAVs placed uniformly in a box at a
/// common height.
struct AssocScenario {
  GridParams params = GridParams::make(45.0, 13.0, 8.0);
  std::vector<UserMotion> users;
  std::size_t uav_count = 4;
  double uav_height = 100.0;
  double d3d = 180.0;
  Region uav_box{-150.0, 50.0, 30.0, 150.0};
  double street_width = 13.0;
  double epsilon = kDefaultEpsilon;
  std::size_t capacity = 1;
  bool proposed_requires_los = true;  // restrict the proposed policy to clear links at t = 0
};

/// UAVs of trial `index`, drawn from their own stream.
std::vector<Uav> place_uavs(const AssocScenario& scenario, std::uint64_t seed, std::uint64_t index);

struct PairedComparison {
  double proposed_mean = 0.0;
  double benchmark_mean = 0.0;
  double diff_mean = 0.0;  // proposed - benchmark
  double diff_stderr = 0.0;
  double ci_low = 0.0;   // 95 %
  double ci_high = 0.0;
  std::uint64_t trials = 0;
};

/// Both policies are scored on the same city and UAV draw in every trial.
PairedComparison evaluate_policies(const AssocScenario& scenario, std::uint64_t trials,
                                   std::uint64_t seed, unsigned threads = 0);

}  // namespace uavlos
