#include <cmath>
#include <random>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "uavlos/mobility.hpp"
#include "uavlos/seeding.hpp"

using namespace uavlos;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &err);
}

LinkScene scene_for(UserMotion m, Uav u, double w = 10.0, double lambda = 1.0 / 58.0,
                    double sigma = 8.0) {
  return LinkScene{m, u, w, lambda, HeightModel::rayleigh(sigma)};
}

// Independent Poisson CDF minimality search.
int cdf_oracle(double mu, double eps) {
  if (mu == 0.0) return 0;
  boost::math::poisson_distribution<double> d(mu);
  int n = 0;
  while (boost::math::cdf(d, n) < 1.0 - eps) ++n;
  return n;
}

}  // namespace

TEST_CASE("ParallelX segment probability") {
  CHECK(p_los_x_segment(0.0, 0.6, -0.01, 15.0) == 0.6);
  CHECK(p_los_x_segment(5.0, 0.6, -0.01, 0.0) == 0.6);
  CHECK(p_los_x_segment(2.0, 0.6, -0.01, 15.0) == doctest::Approx(0.44449093240903).epsilon(1e-13));
  CHECK(std::abs(p_los_x_segment(2.0, 0.6, -0.01, 15.0) - 0.4445) < 5e-5);
}

TEST_CASE("ParallelX decay matches the static probability at the displaced user") {
  // A UAV west of the start: the user recedes, the far-edge ratio is fixed.
  const double lambda = 1.0 / 47.0;
  const Uav u{-40.0, 70.0, 90.0};
  const UserMotion m{{0.0, 0.0}, 12.0, 10.0};
  const HeightModel model = HeightModel::rayleigh(8.0);
  const double a = los_coefficient(10.0 / 70.0, u.h, lambda, 8.0);
  const double base = p_los_static(m.start, u, far_edge_crossing(m.start, u, 10.0), lambda, model);
  for (double t : {0.5, 2.0, 7.5}) {
    const Vec2 g = m.position(t);
    const double fresh = p_los_static(g, u, far_edge_crossing(g, u, 10.0), lambda, model);
    CHECK(p_los_x_segment(t, base, a, m.speed) == doctest::Approx(fresh).epsilon(1e-12));
  }
}

TEST_CASE("ParallelX expected time") {
  CHECK(expected_los_x_segment(1.0, -0.1, 1.0, 10.0) == doctest::Approx(6.321205588285577).epsilon(1e-14));
  CHECK(std::abs(expected_los_x_segment(1.0, -0.1, 1.0, 10.0) - 6.3212) < 5e-5);
  CHECK(expected_los_x_segment(0.7, -0.02, 0.0, 4.0) == doctest::Approx(2.8).epsilon(1e-15));
  CHECK(expected_los_x_segment(0.7, -0.02, 15.0, 0.0) == 0.0);
  // Series branch is continuous with the closed form.
  const double tiny = expected_los_x_segment(0.9, -1e-10, 1.0, 5.0);
  CHECK(tiny == doctest::Approx(0.9 * 5.0 * (1.0 - 0.5 * 5e-10)).epsilon(1e-15));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> base(0.01, 1.0), a(-0.05, 0.0), v(-30.0, 30.0),
      dur(0.0, 10.0), c(0.01, 1.0);
  for (int k = 0; k < 300; ++k) {
    const double p = base(rng), av = a(rng), vv = v(rng), T = dur(rng), scale = c(rng);
    const double closed = expected_los_x_segment(p, av, vv, T);
    const double quad = integrate([&](double t) { return p_los_x_segment(t, p, av, vv); }, 0.0, T);
    if (quad > 0.0) CHECK(std::abs(closed - quad) / quad < 1e-9);
    CHECK(closed >= 0.0);
    CHECK(closed <= T * std::max(1.0, p * std::exp(std::abs(av * vv) * T)));
    CHECK(expected_los_x_segment(scale * p, av, vv, T) == doctest::Approx(scale * closed).epsilon(1e-14));
  }
}

TEST_CASE("ParallelY probability agrees with a fresh static evaluation on a real grid") {
  // Buildings [10, 50] and [60, 100] beyond a 10 m street; gap (50, 60).
  const UrbanGrid grid({0.0, 50.0, 100.0}, {0.0, 50.0}, {30.0, 30.0}, 0.2);
  const Uav u{200.0, 100.0, 120.0};
  const UserMotion m{{0.0, 0.0}, 2.0, 30.0};
  const LinkScene scene = scene_for(m, u, 10.0, 1.0 / 50.0, 8.0);
  const SegmentPlan plan = corner_events(grid, m, u);
  REQUIRE(plan.events().size() == 1);
  const GapEvent& e = plan.events()[0];
  for (double f : {0.0, 0.1, 0.5, 0.9}) {
    const double t = e.t_a + f * (e.t_b - e.t_a);
    const Vec2 g = m.position(t);
    const auto contact = first_block_side(grid, g, u);
    REQUIRE(contact);
    CHECK(contact->orientation == Orientation::ParallelY);
    const double fresh = p_los_static(g, u, contact, scene.lambda, scene.heights);
    CHECK(p_los_y_segment(t, scene, e.gap) == doctest::Approx(fresh).epsilon(1e-9));
  }
}

TEST_CASE("ParallelY probability is constant for a static user") {
  const Uav u{200.0, 100.0, 120.0};
  const LinkScene scene = scene_for(UserMotion{{55.0, 0.0}, 0.0, 10.0}, u);
  const Gap gap{50.0, 80.0};
  const double p0 = p_los_y_segment(0.0, scene, gap);
  CHECK(p_los_y_segment(3.0, scene, gap) == p0);
  CHECK(expected_los_y_segment(scene, gap, 0.0, 10.0) == doctest::Approx(10.0 * p0).epsilon(1e-14));
}

TEST_CASE("gap without a reachable side wall is clear") {
  // The east corner lies beyond the UAV: nothing blocks while in the gap.
  const Uav u{60.0, 100.0, 120.0};
  const LinkScene scene = scene_for(UserMotion{{0.0, 0.0}, 5.0, 10.0}, u);
  const Gap gap{0.0, 1000.0};
  CHECK_FALSE(gap_contact(scene, gap, 1.0).has_value());
  CHECK(p_los_y_segment(1.0, scene, gap) == 1.0);
  CHECK(expected_los_y_segment(scene, gap, 0.0, 4.0) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("three-point Simpson tracks the composite reference") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-200.0, 300.0), uy(20.0, 200.0), west(-100.0, 150.0),
      width(3.0, 30.0), v(1.0, 30.0);
  double worst = 0.0;
  int passes = 0;
  for (int k = 0; k < 400; ++k) {
    const Uav u{ux(rng), uy(rng), 100.0};
    const UserMotion m{{0.0, 0.0}, v(rng), 10.0};
    const LinkScene scene = scene_for(m, u);
    const double w0 = west(rng);
    const SegmentPlan plan = plan_from_gaps(m, u, 10.0, {Gap{w0, w0 + width(rng)}}, 0.0, 10.0);
    for (const GapEvent& e : plan.events()) {
      const double fast = expected_los_y_segment(scene, e.gap, e.t_a, e.t_b);
      const double ref = expected_los_y_segment_reference(scene, e.gap, e.t_a, e.t_b);
      CHECK(fast >= 0.0);
      CHECK(fast <= e.t_b - e.t_a + 1e-12);
      worst = std::max(worst, std::abs(fast - ref) / (e.t_b - e.t_a));
      ++passes;
    }
  }
  MESSAGE("passes=" << passes << " worst residual per second=" << worst);
  CHECK(passes > 50);
  // Measured worst 0.121 s per second of pass: the three-point rule is coarse
  // when the contact wall changes quickly.
  CHECK(worst < 0.2);
}

TEST_CASE("Theorem 1 with no passes reduces to one ParallelX segment") {
  const Uav u{-50.0, 60.0, 100.0};  // west of the start: no sign change
  const UserMotion m{{0.0, 0.0}, 15.0, 10.0};
  const LinkScene scene = scene_for(m, u);
  const SegmentPlan plan(0.0, 10.0, 10.0);
  const double base = p_los_static(m.start, u, far_edge_crossing(m.start, u, 10.0), scene.lambda, scene.heights);
  const double a = los_coefficient(10.0 / 60.0, u.h, scene.lambda, 8.0);
  CHECK(expected_los_theorem1(plan, scene) ==
        doctest::Approx(expected_los_x_segment(base, a, 15.0, 10.0)).epsilon(1e-14));
}

TEST_CASE("Theorem 1 on a realized grid against piecewise quadrature") {
  const UrbanGrid grid({0.0, 50.0, 100.0}, {0.0, 50.0}, {30.0, 30.0}, 0.2);
  const Uav u{200.0, 100.0, 60.0};
  const UserMotion m{{0.0, 0.0}, 2.0, 30.0};
  const LinkScene scene = scene_for(m, u, 10.0, 1.0 / 50.0, 8.0);
  const SegmentPlan plan = corner_events(grid, m, u);
  REQUIRE(plan.events().size() == 1);

  double quad = 0.0;
  for (const Segment& s : plan.segments()) {
    quad += integrate([&](double t) { return p_los_at(scene, plan, t); }, s.t0, s.t1);
  }
  const double fast = expected_los_theorem1(plan, scene);
  const double ref = expected_los_theorem1_reference(plan, scene);
  const double residual = std::abs(fast - ref);
  CHECK(std::abs(fast - quad) <= 2.0 * residual + 1e-9);
  CHECK(std::abs(ref - quad) < 1e-6);
  CHECK(fast >= 0.0);
  CHECK(fast <= 30.0);
}

TEST_CASE("probability is continuous where a pass shares its contact wall") {
  // UAV east of the gap: at t_b the link reaches the gap's east corner, which
  // is also the far-edge wall of the next building.
  const GridParams p = GridParams::make(45.0, 13.0, 8.0);
  int checked = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const UrbanGrid grid = sample_grid(p, trial_seed(41, s), StreetAnchor{0.0, 13.0});
    const Uav u{300.0, 80.0, 100.0};
    const UserMotion m{{-150.0, 0.0}, 20.0, 10.0};
    const LinkScene scene = scene_for(m, u, 13.0, p.lambda(), 8.0);
    const SegmentPlan plan = plan_from_gaps(m, u, 13.0, far_row_gaps(grid), 0.0, 10.0);
    for (const GapEvent& e : plan.events()) {
      if (!(e.t_b < 10.0) || std::isinf(e.gap.east)) continue;
      const double in_gap = p_los_y_segment(e.t_b, scene, e.gap);
      const Vec2 g = m.position(e.t_b);
      const double after = p_los_static(g, u, far_edge_crossing(g, u, 13.0), scene.lambda, scene.heights);
      CHECK(in_gap == doctest::Approx(after).epsilon(1e-6));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("Poisson truncation") {
  CHECK(poisson_truncation(0.0, 0.01) == 0);
  // CDF(0) = e^-0.1 = 0.905, CDF(1) = 0.995.
  CHECK(poisson_truncation(0.1, 0.01) == 1);
  const double mu = 15.0 * 10.0 / 58.0;
  CHECK(mu == doctest::Approx(2.586).epsilon(1e-3));
  CHECK(poisson_truncation(1.0 / 58.0, 15.0, 10.0, 1e-3) == cdf_oracle(mu, 1e-3));
  CHECK_THROWS_AS(poisson_truncation(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_truncation(1.0, 1.0), std::invalid_argument);

  for (double m : {0.001, 0.1, 0.5, 1.0, 2.586, 5.0, 12.0, 40.0, 150.0}) {
    for (double eps : {0.5, 0.1, 1e-2, 1e-3, 1e-6, 1e-9}) {
      CAPTURE(m);
      CAPTURE(eps);
      CHECK(poisson_truncation(m, eps) == cdf_oracle(m, eps));
    }
  }
}

TEST_CASE("canonical layouts") {
  const Uav u{50.0, 50.0, 100.0};
  const UserMotion m{{0.0, 0.0}, 15.0, 10.0};
  const LinkScene scene = scene_for(m, u, 13.0);
  CHECK(canonical_plan(scene, 0.0, 10.0, 0, 13.0).events().empty());
  const SegmentPlan plan = canonical_plan(scene, 0.0, 10.0, 3, 13.0);
  REQUIRE(plan.events().size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(plan.events()[i].t_a == doctest::Approx(2.5 * (i + 1)));
    // The link needs mu_s / (v (1 - w / dy)) seconds to sweep the street.
    CHECK(plan.events()[i].t_b - plan.events()[i].t_a ==
          doctest::Approx(13.0 / (15.0 * (1.0 - 13.0 / 50.0))));
  }
  // Dense layouts are clipped by the next pass.
  const SegmentPlan tight = canonical_plan(scene, 0.0, 10.0, 20, 13.0);
  for (std::size_t k = 1; k < tight.events().size(); ++k) {
    CHECK(tight.events()[k].t_a >= tight.events()[k - 1].t_b);
  }
}

TEST_CASE("expected total LoS time") {
  const GridParams p = GridParams::make(45.0, 13.0, 8.0);
  const Uav u{50.0, 50.0, 100.0, 180.0};

  SUBCASE("a static user gets the static probability for the whole epoch") {
    const UserMotion m{{0.0, 0.0}, 0.0, 10.0};
    const double ps = p_los_static(m.start, u, far_edge_crossing(m.start, u, 13.0), p.lambda(),
                                   HeightModel::rayleigh(8.0));
    const ExpectedLosResult r = expected_los_total(p, m, u, 13.0);
    CHECK(std::abs(r.value - ps * 10.0) <= 1e-12);
    CHECK(r.n == 0);
  }
  SUBCASE("an almost empty city") {
    const GridParams empty = GridParams::make(1e12, 13.0, 8.0);
    const UserMotion m{{0.0, 0.0}, 15.0, 10.0};
    const double p0 = p0_los(100.0 * 13.0 / 50.0, HeightModel::rayleigh(8.0));
    CHECK(expected_los_total(empty, m, u, 13.0).value == doctest::Approx(p0 * 10.0).epsilon(1e-10));
  }
  SUBCASE("weights") {
    const UserMotion m{{0.0, 0.0}, 15.0, 10.0};
    for (double eps : {0.1, 1e-3, 1e-8}) {
      const ExpectedLosResult r = expected_los_total(p, m, u, 13.0, eps);
      CHECK(r.weight_mass >= 1.0 - eps);
      double sum = 0.0;
      for (const EllTerm& t : r.per_ell) {
        CHECK(t.weight > 0.0);
        sum += t.weight / r.weight_mass;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      CHECK(static_cast<int>(r.per_ell.size()) == r.n + 1);
    }
  }
  SUBCASE("UAV over the user's own street") {
    const UserMotion m{{0.0, 0.0}, 15.0, 10.0};
    CHECK(expected_los_total(p, m, Uav{30.0, 8.0, 100.0, 180.0}, 13.0).value == 10.0);
    CHECK_THROWS_AS(expected_los_total(p, m, Uav{30.0, -8.0, 100.0, 180.0}, 13.0), GeometryError);
  }
  SUBCASE("out of range") {
    const UserMotion m{{0.0, 0.0}, 15.0, 10.0};
    CHECK(expected_los_total(p, m, Uav{500.0, 50.0, 100.0, 180.0}, 13.0).value == 0.0);
  }
  SUBCASE("always within the coverage window") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ux(-200.0, 200.0), uy(14.0, 200.0), h(20.0, 160.0),
        v(0.0, 40.0);
    for (int k = 0; k < 300; ++k) {
      const Uav q{ux(rng), uy(rng), h(rng), 200.0};
      const UserMotion m{{0.0, 0.0}, v(rng), 10.0};
      const ExpectedLosResult r = expected_los_total(p, m, q, 13.0);
      CHECK(r.value >= 0.0);
      CHECK(r.value <= r.window.length() + 1e-9);
    }
  }
}

TEST_CASE("sampled-layout marginalization") {
  const GridParams p = GridParams::make(45.0, 13.0, 8.0);
  const Uav u{50.0, 50.0, 100.0, 180.0};
  const UserMotion m{{0.0, 0.0}, 15.0, 10.0};
  const double a = expected_los_sampled_layouts(p, m, u, 13.0, 200, 3);
  CHECK(a == expected_los_sampled_layouts(p, m, u, 13.0, 200, 3));
  CHECK(a >= 0.0);
  CHECK(a <= 10.0);
  // Static users: only the gap under the crossing point matters.
  const UserMotion still{{0.0, 0.0}, 0.0, 10.0};
  const double s = expected_los_sampled_layouts(p, still, u, 13.0, 200, 3);
  CHECK(s >= 0.0);
  CHECK(s <= 10.0);
}
