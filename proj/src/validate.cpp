#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "uavlos/experiment.hpp"
#include "uavlos/mobility.hpp"
#include "uavlos/oracle.hpp"
#include "uavlos/seeding.hpp"

namespace uavlos {
namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

CheckResult lemma1_vs_quadrature(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> base(0.01, 1.0), a(-0.05, 0.0), v(-30.0, 30.0),
      dur(0.0, 10.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double p = base(rng), av = a(rng), vv = v(rng), T = dur(rng);
    const double closed = expected_los_x_segment(p, av, vv, T);
    double err = 0.0;
    const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return p_los_x_segment(t, p, av, vv); }, 0.0, T, 15, 1e-14, &err);
    if (quad > 0.0) worst = std::max(worst, std::abs(closed - quad) / quad);
  }
  return {"lemma1-closed-form", worst <= 1e-9, "max_rel_err=" + sci(worst) + " segments=1000"};
}

CheckResult two_paths(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x2b);
  std::uniform_real_distribution<double> coord(-200.0, 200.0), up(15.0, 200.0), h(20.0, 200.0),
      mu(5.0, 80.0), sig(3.0, 25.0), w(3.0, 12.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec2 g{0.0, 0.0};
    const double street = w(rng);
    const Uav u{coord(rng), street + up(rng), h(rng)};
    const double lambda = 1.0 / mu(rng);
    const HeightModel model = HeightModel::rayleigh(sig(rng));
    const auto contact = far_edge_crossing(g, u, street);
    const double closed = p_los_static(g, u, contact, lambda, model);
    const double numeric = p_los_static(g, u, contact, lambda, model.as_generic());
    if (closed > 1e-300) worst = std::max(worst, std::abs(closed - numeric) / closed);
  }
  return {"rayleigh-vs-generic", worst <= 1e-8, "max_rel_err=" + sci(worst) + " geometries=1000"};
}

CheckResult simpson_residual(const ExperimentConfig& c) {
  const GridParams params = c.grid_params();
  const UserMotion motion{{0.0, 0.0}, std::max(c.speed, 1.0), c.epoch};
  const Uav u = c.uav_at_height(c.uav.h);
  double worst = 0.0;
  bool bounded = true;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const UrbanGrid grid = sample_grid(params, trial_seed(c.seed, k), StreetAnchor{0.0, c.mu_s});
    const CoverageWindow win = coverage_window(motion, u);
    if (win.empty()) continue;
    const SegmentPlan plan = plan_from_gaps(motion, u, c.mu_s, far_row_gaps(grid), win.t0, win.t1);
    const LinkScene scene{motion, u, c.mu_s, params.lambda(), HeightModel::rayleigh(params.sigma())};
    const double fast = expected_los_theorem1(plan, scene);
    const double ref = expected_los_theorem1_reference(plan, scene);
    worst = std::max(worst, std::abs(fast - ref));
    bounded = bounded && fast >= 0.0 && fast <= win.length() + 1e-9;
  }
  return {"simpson-residual", bounded,
          "max_abs_residual_s=" + sci(worst) + " layouts=50 (three-point vs 129-node)"};
}

CheckResult empty_city(const ExperimentConfig& c) {
  // Mean building spacing of 1e12 m leaves the region empty.
  const GridParams params = GridParams::make(1e12, c.mu_s, c.effective_sigma(), c.region);
  const UserMotion motion{{0.0, 0.0}, c.speed, c.epoch};
  const Uav u = c.uav_at_height(c.uav.h);
  McOptions options;
  options.street_width = c.mu_s;
  options.threads = c.threads;
  const std::uint64_t trials = std::min<std::uint64_t>(c.trials, 1000);
  const TrialStats mc = monte_carlo_expected_los(params, motion, u, trials, c.seed, options);
  const double t_min = coverage_time(motion, u);
  // The analytic model always places a wall at the far street edge, so its
  // empty-city limit is P0 * T_min rather than T_min.
  const double p0 = HeightModel::rayleigh(params.sigma())
                        .cdf(u.h * c.mu_s / (u.y - motion.start.y));
  const double analytic = expected_los_total(params, motion, u, c.mu_s, c.epsilon).value;
  const bool ok = mc.mean == t_min && mc.std_error == 0.0 && std::abs(analytic - p0 * t_min) <= 1e-9;
  return {"empty-city", ok,
          "mc_mean=" + sci(mc.mean) + " t_min=" + sci(t_min) + " mc_stderr=" + sci(mc.std_error) +
              " analytic=" + sci(analytic) + " p0_t_min=" + sci(p0 * t_min)};
}

CheckResult analytic_vs_mc(const ExperimentConfig& c) {
  const GridParams params = c.grid_params();
  const UserMotion motion{{0.0, 0.0}, c.speed, c.epoch};
  const Uav u = c.uav_at_height(c.uav.h);
  McOptions options;
  options.street_width = c.mu_s;
  options.threads = c.threads;
  const TrialStats mc = monte_carlo_expected_los(params, motion, u, c.trials, c.seed, options);
  const double analytic = expected_los_total(params, motion, u, c.mu_s, c.epsilon).value;
  const double tol = std::max(0.05 * std::abs(mc.mean), 3.0 * mc.std_error);
  return {"analytic-vs-mc", std::abs(analytic - mc.mean) <= tol,
          "analytic=" + sci(analytic) + " mc=" + sci(mc.mean) + " stderr=" + sci(mc.std_error) +
              " tol=" + sci(tol)};
}

CheckResult single_pairs(const ExperimentConfig& c) {
  const GridParams params = c.grid_params();
  std::mt19937_64 rng(c.seed ^ 0x51);
  std::uniform_real_distribution<double> ux(-150.0, 150.0), uy(c.mu_s + 5.0, 150.0),
      speed(0.0, 30.0);
  int mismatched = 0;
  int assigned = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const UrbanGrid grid = sample_grid(params, trial_seed(c.seed, k), StreetAnchor{0.0, c.mu_s});
    const std::vector<UserMotion> users{UserMotion{{0.0, 0.0}, speed(rng), c.epoch}};
    const std::vector<Uav> uavs{Uav{ux(rng), uy(rng), 100.0, 180.0}};
    const Eligibility ok = los_at_start(users, uavs, grid);
    const Assignment mine = assign_proposed(users, uavs, params, c.mu_s, c.epsilon, 1, &ok);
    const Assignment theirs = assign_benchmark(users, uavs, grid, 1);
    if (mine.uav_of_user != theirs.uav_of_user) ++mismatched;
    if (mine.uav_of_user[0]) ++assigned;
  }
  return {"single-pair-identical", mismatched == 0,
          "instances=100 assigned=" + std::to_string(assigned) +
              " mismatched=" + std::to_string(mismatched)};
}

CheckResult greedy_replay(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9d);
  std::uniform_real_distribution<double> score(0.0, 10.0);
  std::bernoulli_distribution zero(0.2);
  int bad = 0;
  for (int k = 0; k < 200; ++k) {
    ScoreMatrix s(5, std::vector<double>(5));
    for (auto& row : s) {
      for (double& x : row) x = zero(rng) ? 0.0 : std::round(score(rng) * 2.0) / 2.0;
    }
    const std::size_t cap = 1 + static_cast<std::size_t>(k % 2);
    const Assignment a = greedy_max(s, cap, Policy::Proposed);
    std::vector<char> done(5, 0);
    std::vector<std::size_t> load(5, 0);
    for (const GreedyRound& r : a.rounds) {
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
          if (done[i] || load[j] >= cap) continue;
          const bool better = s[i][j] > r.score ||
                              (s[i][j] == r.score && (i < r.user || (i == r.user && j < r.uav)));
          if (better) ++bad;
        }
      }
      done[r.user] = 1;
      ++load[r.uav];
    }
  }
  return {"greedy-replay", bad == 0, "instances=200 violations=" + std::to_string(bad)};
}

}  // namespace

bool is_validation_suite(std::string_view suite) {
  return suite == "quadrature" || suite == "mc-agreement" || suite == "assoc" || suite == "all";
}

std::vector<CheckResult> run_validation(std::string_view suite, const ExperimentConfig& c) {
  if (!is_validation_suite(suite)) throw ConfigError("unknown validation suite '" + std::string(suite) + "'");
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  if (all || suite == "quadrature") {
    out.push_back(lemma1_vs_quadrature(c.seed));
    out.push_back(two_paths(c.seed));
    out.push_back(simpson_residual(c));
  }
  if (all || suite == "mc-agreement") {
    out.push_back(empty_city(c));
    out.push_back(analytic_vs_mc(c));
  }
  if (all || suite == "assoc") {
    out.push_back(single_pairs(c));
    out.push_back(greedy_replay(c.seed));
  }
  return out;
}

}  // namespace uavlos
