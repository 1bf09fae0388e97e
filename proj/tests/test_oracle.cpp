#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "uavlos/oracle.hpp"
#include "uavlos/seeding.hpp"

using namespace uavlos;

namespace {

// Brute force: march the 3D link and compare with every roof.
bool brute_los(const UrbanGrid& grid, Vec2 g, const Uav& u, int steps = 200000) {
  for (int k = 1; k < steps; ++k) {
    const double s = static_cast<double>(k) / steps;
    const Vec2 p{g.x + (u.x - g.x) * s, g.y + (u.y - g.y) * s};
    const double z = u.h * s;
    for (std::size_t i = 0; i < grid.x_cells(); ++i) {
      for (std::size_t j = 0; j < grid.y_cells(); ++j) {
        const Rect r = grid.building(i, j);
        if (p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1 && z <= grid.height(i, j)) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("empty city is always in LoS") {
  const UrbanGrid empty({}, {}, {}, 0.2);
  CHECK(is_los(empty, {0.0, 0.0}, Uav{30.0, 40.0, 50.0}));
  const UserMotion m{{0.0, 0.0}, 10.0, 10.0};
  const LosIntervalSet s = los_time(empty, m, Uav{30.0, 40.0, 50.0});
  CHECK(s.total == 10.0);
  REQUIRE(s.intervals.size() == 1);
  CHECK(s.intervals[0].start == 0.0);
  CHECK(s.intervals[0].end == 10.0);
}

TEST_CASE("a roof just below the link does not block") {
  // Building [10, 50]^2; the link from the origin enters at (12.5, 10) at 15 m.
  const Uav u{100.0, 80.0, 120.0};
  CHECK(is_los(UrbanGrid({0.0, 50.0}, {0.0, 50.0}, {14.99}, 0.2), {0.0, 0.0}, u));
  CHECK_FALSE(is_los(UrbanGrid({0.0, 50.0}, {0.0, 50.0}, {15.01}, 0.2), {0.0, 0.0}, u));
  CHECK_THROWS_AS(is_los(UrbanGrid({0.0, 50.0}, {0.0, 50.0}, {15.0}, 0.2), {20.0, 20.0}, u),
                  GeometryError);
}

TEST_CASE("a UAV straight overhead is visible") {
  const UrbanGrid grid({0.0, 50.0}, {0.0, 50.0}, {200.0}, 0.2);
  CHECK(is_los(grid, {5.0, 5.0}, Uav{5.0, 5.0, 80.0}));
}

TEST_CASE("one tall building shadows a third of the epoch") {
  // Footprint [13, 17] x [50, 60], 150 m tall, UAV at 100 m: blocked for t in [10, 20].
  const UrbanGrid grid({9.0, 17.0}, {40.0, 60.0}, {150.0}, 0.5);
  const Rect r = grid.building(0, 0);
  CHECK(r.x0 == 13.0);
  CHECK(r.y0 == 50.0);
  const UserMotion m{{0.0, 0.0}, 1.0, 30.0};
  const Uav u{15.0, 100.0, 100.0};
  const LosIntervalSet s = los_time(grid, m, u);
  CHECK(std::abs(s.total - 20.0) < 1e-5);
  REQUIRE(s.intervals.size() == 2);
  CHECK(s.intervals[0].end == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(s.intervals[1].start == doctest::Approx(20.0).epsilon(1e-9));

  const auto b = blocking_interval(r, 150.0, m, u, 0.0, 30.0);
  REQUIRE(b);
  CHECK(b->start == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(b->end == doctest::Approx(20.0).epsilon(1e-9));
  CHECK_FALSE(blocking_interval(r, 150.0, m, u, 21.0, 30.0));

  CHECK(std::abs(los_time_sampled(grid, m, u, 1e-3) - 20.0) <= 2e-3);
}

TEST_CASE("lower buildings block for shorter spans") {
  const Rect r{13.0, 17.0, 50.0, 60.0};
  const UserMotion m{{0.0, 0.0}, 1.0, 30.0};
  const Uav u{15.0, 100.0, 100.0};
  double previous = -1.0;
  for (double h : {10.0, 30.0, 50.0, 55.0, 58.0, 60.0, 80.0}) {
    const auto b = blocking_interval(r, h, m, u, 0.0, 30.0);
    const double len = b ? b->length() : 0.0;
    CHECK(len >= previous - 1e-12);
    previous = len;
  }
  CHECK_FALSE(blocking_interval(r, 49.0, m, u, 0.0, 30.0));
}

TEST_CASE("exact LoS test against brute-force marching") {
  const GridParams p = GridParams::make(45.0, 13.0, 15.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-180.0, 180.0), uy(-180.0, 180.0), h(5.0, 60.0),
      gx(-150.0, 150.0);
  int clear = 0, blocked = 0;
  for (std::uint64_t k = 0; k < 120; ++k) {
    const UrbanGrid grid = sample_grid(p, trial_seed(77, k), StreetAnchor{0.0, 13.0});
    const Vec2 g{gx(rng), 1.0};
    const Uav u{ux(rng), uy(rng), h(rng)};
    const bool fast = is_los(grid, g, u);
    CHECK(fast == brute_los(grid, g, u, 20000));
    (fast ? clear : blocked) += 1;
  }
  CHECK(clear > 10);
  CHECK(blocked > 10);
}

TEST_CASE("interval oracle agrees with dense sampling") {
  const GridParams p = GridParams::make(45.0, 13.0, 15.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(-100.0, 100.0), uy(20.0, 150.0), h(30.0, 120.0),
      v(0.0, 30.0);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const UrbanGrid grid = sample_grid(p, trial_seed(5, k), StreetAnchor{0.0, 13.0});
    const UserMotion m{{-50.0, 0.0}, v(rng), 10.0};
    const Uav u{ux(rng), uy(rng), h(rng), 180.0};
    const LosIntervalSet s = los_time(grid, m, u);
    const double sampled = los_time_sampled(grid, m, u, 1e-3);
    const double transitions = 2.0 * static_cast<double>(s.intervals.size()) + 1.0;
    CHECK(std::abs(s.total - sampled) <= 2e-3 * transitions);
    for (std::size_t i = 1; i < s.intervals.size(); ++i) {
      CHECK(s.intervals[i].start > s.intervals[i - 1].end);
    }
  }
}

TEST_CASE("coverage window") {
  const Uav u{0.0, 18.0, 40.0, 50.0};  // ground radius 30
  const UserMotion m{{0.0, 0.0}, 10.0, 10.0};
  const CoverageWindow w = coverage_window(m, u);
  CHECK(w.t0 == 0.0);
  CHECK(w.t1 == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(coverage_time(m, u) == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(coverage_time(m, Uav{0.0, 500.0, 40.0, 50.0}) == 0.0);
  CHECK(coverage_time(m, Uav{0.0, 0.0, 50.0, 50.0}) == 0.0);
  // Entering later than t = 0.
  const CoverageWindow late = coverage_window(m, Uav{60.0, 18.0, 40.0, 50.0});
  CHECK(late.t0 == doctest::Approx(3.6).epsilon(1e-12));
  CHECK(late.t1 == doctest::Approx(8.4).epsilon(1e-12));
  // LoS time never leaves the window.
  const UrbanGrid empty({}, {}, {}, 0.2);
  CHECK(los_time(empty, m, Uav{60.0, 18.0, 40.0, 50.0}).total == doctest::Approx(4.8).epsilon(1e-12));
}

TEST_CASE("Monte Carlo estimator") {
  const GridParams p = GridParams::make(45.0, 13.0, 8.0);
  const UserMotion m{{0.0, 0.0}, 15.0, 10.0};
  const Uav u{50.0, 50.0, 100.0, 180.0};
  McOptions o;
  o.street_width = 13.0;

  SUBCASE("deterministic and thread invariant") {
    o.threads = 1;
    const TrialStats a = monte_carlo_expected_los(p, m, u, 300, 9, o);
    o.threads = 4;
    const TrialStats b = monte_carlo_expected_los(p, m, u, 300, 9, o);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.trials == 300);
    CHECK(a.mean >= 0.0);
    CHECK(a.mean <= coverage_time(m, u));
    const TrialStats c = monte_carlo_expected_los(p, m, u, 300, 10, o);
    CHECK(c.mean != a.mean);
  }
  SUBCASE("a single trial") {
    const TrialStats s = monte_carlo_expected_los(p, m, u, 1, 9, o);
    CHECK(s.trials == 1);
    CHECK(s.std_error == 0.0);
  }
  SUBCASE("empty city gives the coverage time exactly") {
    const GridParams empty = GridParams::make(1e12, 13.0, 8.0);
    const TrialStats s = monte_carlo_expected_los(empty, m, u, 50, 9, o);
    CHECK(s.mean == coverage_time(m, u));
    CHECK(s.std_error == 0.0);
  }
  SUBCASE("zero trials are rejected") {
    CHECK_THROWS(monte_carlo_expected_los(p, m, u, 0, 9, o));
  }
  SUBCASE("trial log") {
    std::ostringstream log;
    o.trial_log = &log;
    o.log_fields = "\"sweep_value\":15,";
    const TrialStats s = monte_carlo_expected_los(p, m, u, 5, 9, o);
    std::istringstream in(log.str());
    std::string line;
    double sum = 0.0;
    int n = 0;
    while (std::getline(in, line)) {
      const nlohmann::json j = nlohmann::json::parse(line);
      CHECK(j.at("trial").get<int>() == n);
      CHECK(j.at("sweep_value").get<double>() == 15.0);
      CHECK(j.at("seed").get<std::uint64_t>() == trial_seed(9, n));
      sum += j.at("los_total").get<double>();
      ++n;
    }
    CHECK(n == 5);
    CHECK(sum / 5.0 == doctest::Approx(s.mean).epsilon(1e-9));
  }
}

TEST_CASE("static Monte Carlo") {
  const GridParams p = GridParams::make(45.0, 13.0, 8.0);
  const StaticAgreement a = monte_carlo_static_los(p, {0.0, 0.0}, Uav{50.0, 50.0, 100.0}, 13.0, 400, 2);
  CHECK(a.trials == 400);
  CHECK(a.los_fraction >= 0.0);
  CHECK(a.los_fraction <= 1.0);
  CHECK(a.binomial_stderr ==
        doctest::Approx(std::sqrt(a.los_fraction * (1 - a.los_fraction) / 400.0)).epsilon(1e-12));
  CHECK(a.mean_conditional_p > 0.0);
  CHECK(a.mean_conditional_p <= 1.0);
}

TEST_CASE("parallel_for visits each index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 7, [&](std::uint64_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
  parallel_for(0, 3, [&](std::uint64_t) { CHECK(false); });
}
