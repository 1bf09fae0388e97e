#include "uavlos/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "uavlos/oracle.hpp"
#include "uavlos/seeding.hpp"

namespace uavlos {
namespace {

double distance3d(Vec2 g, const Uav& u) {
  const double dx = u.x - g.x;
  const double dy = u.y - g.y;
  return std::sqrt(dx * dx + dy * dy + u.h * u.h);
}

constexpr std::uint64_t kPlacementStream = 0x5bd1e9955bd1e995ULL;

}  // namespace

Assignment greedy_max(const ScoreMatrix& scores, std::size_t capacity, Policy policy) {
  Assignment out;
  out.policy = policy;
  out.capacity = capacity;
  out.uav_of_user.assign(scores.size(), std::nullopt);
  if (scores.empty() || capacity == 0) return out;
  const std::size_t uavs = scores.front().size();
  std::vector<std::size_t> load(uavs, 0);

  while (true) {
    std::optional<GreedyRound> best;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (out.uav_of_user[i]) continue;
      for (std::size_t j = 0; j < uavs; ++j) {
        if (load[j] >= capacity) continue;
        const double s = scores[i][j];
        // Strict comparison keeps the first (lowest user, lowest UAV) maximum.
        if (s > 0.0 && (!best || s > best->score)) best = GreedyRound{i, j, s};
      }
    }
    if (!best) break;
    out.uav_of_user[best->user] = best->uav;
    ++load[best->uav];
    out.rounds.push_back(*best);
  }
  return out;
}

ScoreMatrix expected_los_scores(const std::vector<UserMotion>& users, const std::vector<Uav>& uavs,
                                const GridParams& params, double street_width, double epsilon) {
  ScoreMatrix scores(users.size(), std::vector<double>(uavs.size(), 0.0));
  parallel_for(users.size() * uavs.size(), 1, [&](std::uint64_t k) {
    const std::size_t i = k / uavs.size();
    const std::size_t j = k % uavs.size();
    scores[i][j] = expected_los_total(params, users[i], uavs[j], street_width, epsilon).value;
  });
  return scores;
}

Assignment assign_proposed(const std::vector<UserMotion>& users, const std::vector<Uav>& uavs,
                           const GridParams& params, double street_width, double epsilon,
                           std::size_t capacity, const Eligibility* eligible) {
  ScoreMatrix scores = expected_los_scores(users, uavs, params, street_width, epsilon);
  if (eligible) {
    for (std::size_t i = 0; i < users.size(); ++i) {
      for (std::size_t j = 0; j < uavs.size(); ++j) {
        if (!(*eligible)[i][j]) scores[i][j] = 0.0;
      }
    }
  }
  return greedy_max(scores, capacity, Policy::Proposed);
}

Eligibility los_at_start(const std::vector<UserMotion>& users, const std::vector<Uav>& uavs,
                         const UrbanGrid& grid) {
  Eligibility ok(users.size(), std::vector<char>(uavs.size(), 0));
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (std::size_t j = 0; j < uavs.size(); ++j) {
      const Vec2 g = users[i].start;
      ok[i][j] = distance3d(g, uavs[j]) <= uavs[j].d3d && is_los(grid, g, uavs[j]) ? 1 : 0;
    }
  }
  return ok;
}

Assignment assign_benchmark(const std::vector<UserMotion>& users, const std::vector<Uav>& uavs,
                            const UrbanGrid& grid, std::size_t capacity) {
  const Eligibility ok = los_at_start(users, uavs, grid);
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (std::size_t j = 0; j < uavs.size(); ++j) {
      if (ok[i][j]) candidates.emplace_back(distance3d(users[i].start, uavs[j]), i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  Assignment out;
  out.policy = Policy::Benchmark;
  out.capacity = capacity;
  out.uav_of_user.assign(users.size(), std::nullopt);
  std::vector<std::size_t> load(uavs.size(), 0);
  for (const auto& [d, i, j] : candidates) {
    if (out.uav_of_user[i] || load[j] >= capacity) continue;
    out.uav_of_user[i] = j;
    ++load[j];
    out.rounds.push_back({i, j, d});
  }
  return out;
}

double realized_los_total(const Assignment& assignment, const UrbanGrid& grid,
                          const std::vector<UserMotion>& users, const std::vector<Uav>& uavs) {
  double total = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (auto j = assignment.uav_of_user[i]) total += los_time(grid, users[i], uavs[*j]).total;
  }
  return total;
}

std::vector<Uav> place_uavs(const AssocScenario& scenario, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(trial_seed(seed ^ kPlacementStream, index));
  std::uniform_real_distribution<double> px(scenario.uav_box.x_min, scenario.uav_box.x_max);
  std::uniform_real_distribution<double> py(scenario.uav_box.y_min, scenario.uav_box.y_max);
  std::vector<Uav> uavs(scenario.uav_count);
  for (Uav& u : uavs) {
    u.x = px(rng);
    u.y = py(rng);
    u.h = scenario.uav_height;
    u.d3d = scenario.d3d;
  }
  return uavs;
}

PairedComparison evaluate_policies(const AssocScenario& scenario, std::uint64_t trials,
                                   std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("paired evaluation needs at least one trial");
  if (scenario.users.empty()) throw std::invalid_argument("paired evaluation needs users");
  const StreetAnchor anchor{scenario.users.front().start.y, scenario.street_width};
  for (const UserMotion& m : scenario.users) {
    if (m.start.y != anchor.y) throw std::invalid_argument("users must share one street");
  }

  std::vector<double> proposed(trials);
  std::vector<double> benchmark(trials);
  parallel_for(trials, threads, [&](std::uint64_t t) {
    const UrbanGrid grid = sample_grid(scenario.params, trial_seed(seed, t), anchor);
    const std::vector<Uav> uavs = place_uavs(scenario, seed, t);
    const Eligibility ok = los_at_start(scenario.users, uavs, grid);
    const Assignment mine =
        assign_proposed(scenario.users, uavs, scenario.params, scenario.street_width,
                        scenario.epsilon, scenario.capacity,
                        scenario.proposed_requires_los ? &ok : nullptr);
    const Assignment theirs = assign_benchmark(scenario.users, uavs, grid, scenario.capacity);
    proposed[t] = realized_los_total(mine, grid, scenario.users, uavs);
    benchmark[t] = realized_los_total(theirs, grid, scenario.users, uavs);
  });

  PairedComparison out;
  out.trials = trials;
  const double n = static_cast<double>(trials);
  double sp = 0.0;
  double sb = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    sp += proposed[t];
    sb += benchmark[t];
  }
  out.proposed_mean = sp / n;
  out.benchmark_mean = sb / n;
  out.diff_mean = out.proposed_mean - out.benchmark_mean;
  if (trials > 1) {
    double ss = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const double d = proposed[t] - benchmark[t] - out.diff_mean;
      ss += d * d;
    }
    out.diff_stderr = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  out.ci_low = out.diff_mean - 1.96 * out.diff_stderr;
  out.ci_high = out.diff_mean + 1.96 * out.diff_stderr;
  return out;
}

}  // namespace uavlos
