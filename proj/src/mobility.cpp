#include "uavlos/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "uavlos/seeding.hpp"

namespace uavlos {
namespace {

double far_edge_ratio(const LinkScene& scene) {
  const double dy = scene.uav.y - scene.motion.start.y;
  if (!(dy > scene.street_width)) {
    throw GeometryError("UAV does not lie beyond the far street edge");
  }
  return scene.street_width / dy;
}

// Void-probability rate per meter of |x_u - x_t| on a ParallelX segment.
double x_segment_coefficient(const LinkScene& scene) {
  const double r = far_edge_ratio(scene);
  if (scene.heights.is_rayleigh()) {
    return los_coefficient(r, scene.uav.h, scene.lambda, scene.heights.sigma());
  }
  if (scene.lambda == 0.0) return 0.0;
  auto taller = [&](double s) { return 1.0 - scene.heights.cdf(scene.uav.h * s); };
  double err = 0.0;
  return -scene.lambda *
         boost::math::quadrature::gauss_kronrod<double, 31>::integrate(taller, r, 1.0, 20, 1e-13, &err);
}

double p_los_x_at(const LinkScene& scene, double t) {
  const Vec2 g = scene.motion.position(t);
  return p_los_static(g, scene.uav, far_edge_crossing(g, scene.uav, scene.street_width),
                      scene.lambda, scene.heights);
}

double simpson_composite(const LinkScene& scene, const Gap& gap, double t0, double t1, int nodes) {
  if (!(t1 > t0)) return 0.0;
  if (nodes < 3) nodes = 3;
  if (nodes % 2 == 0) ++nodes;
  const int intervals = nodes - 1;
  const double h = (t1 - t0) / intervals;
  double sum = p_los_y_segment(t0, scene, gap) + p_los_y_segment(t1, scene, gap);
  for (int k = 1; k < intervals; ++k) {
    sum += (k % 2 ? 4.0 : 2.0) * p_los_y_segment(t0 + k * h, scene, gap);
  }
  return sum * h / 3.0;
}

template <typename YRule>
double theorem1_sum(const SegmentPlan& plan, const LinkScene& scene, YRule&& y_rule) {
  const double a = x_segment_coefficient(scene);
  const double v = scene.motion.speed;
  const double x0 = scene.motion.start.x;
  double total = 0.0;
  for (const Segment& seg : plan.segments()) {
    if (seg.orientation == Orientation::ParallelY) {
      total += y_rule(plan.events()[*seg.event].gap, seg.t0, seg.t1);
      continue;
    }
    // |x_u - x_t| changes slope where the user passes below the UAV.
    std::vector<double> cuts{seg.t0};
    if (v > 0.0) {
      const double t_under = (scene.uav.x - x0) / v;
      if (t_under > seg.t0 && t_under < seg.t1) cuts.push_back(t_under);
    }
    cuts.push_back(seg.t1);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double base = p_los_x_at(scene, cuts[k]);
      const double xt = scene.motion.position(cuts[k]).x;
      const double signed_v = xt < scene.uav.x ? -v : v;
      total += expected_los_x_segment(base, a, signed_v, cuts[k + 1] - cuts[k]);
    }
  }
  return total;
}

}  // namespace

double p_los_x_segment(double t, double base, double a, double v) {
  return base * std::exp(a * v * t);
}

double expected_los_x_segment(double base, double a, double v, double duration) {
  if (!(duration > 0.0)) return 0.0;
  const double x = a * v * duration;
  if (std::abs(x) < 1e-8) return base * duration * (1.0 + x / 2.0);
  return base * std::expm1(x) / (a * v);
}

std::optional<FirstBlockSide> gap_contact(const LinkScene& scene, const Gap& gap, double t) {
  const Vec2 g = scene.motion.position(t);
  const Uav& u = scene.uav;
  const double dy = u.y - g.y;
  const double cross = g.x + (u.x - g.x) * (scene.street_width / dy);
  double wall = 0.0;
  if (u.x > cross) {
    wall = gap.east;
    if (!(wall < u.x)) return std::nullopt;
  } else if (u.x < cross) {
    wall = gap.west;
    if (!(wall > u.x)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  const double y = g.y + dy * (wall - g.x) / (u.x - g.x);
  return FirstBlockSide{{wall, y}, Orientation::ParallelY};
}

double p_los_y_segment(double t, const LinkScene& scene, const Gap& gap) {
  const Vec2 g = scene.motion.position(t);
  return p_los_static(g, scene.uav, gap_contact(scene, gap, t), scene.lambda, scene.heights);
}

double expected_los_y_segment(const LinkScene& scene, const Gap& gap, double t0, double t1) {
  if (!(t1 > t0)) return 0.0;
  const double mid = 0.5 * (t0 + t1);
  return (t1 - t0) / 6.0 *
         (p_los_y_segment(t0, scene, gap) + 4.0 * p_los_y_segment(mid, scene, gap) +
          p_los_y_segment(t1, scene, gap));
}

double expected_los_y_segment_reference(const LinkScene& scene, const Gap& gap, double t0,
                                        double t1, int nodes) {
  return simpson_composite(scene, gap, t0, t1, nodes);
}

double p_los_at(const LinkScene& scene, const SegmentPlan& plan, double t) {
  if (auto k = plan.event_at(t)) return p_los_y_segment(t, scene, plan.events()[*k].gap);
  return p_los_x_at(scene, t);
}

double expected_los_theorem1(const SegmentPlan& plan, const LinkScene& scene) {
  return theorem1_sum(plan, scene, [&](const Gap& gap, double t0, double t1) {
    return expected_los_y_segment(scene, gap, t0, t1);
  });
}

double expected_los_theorem1_reference(const SegmentPlan& plan, const LinkScene& scene,
                                       int nodes) {
  return theorem1_sum(plan, scene, [&](const Gap& gap, double t0, double t1) {
    return expected_los_y_segment_reference(scene, gap, t0, t1, nodes);
  });
}

int poisson_truncation(double mu, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(mu >= 0.0)) throw std::invalid_argument("poisson mean must be nonnegative");
  if (mu == 0.0) return 0;
  const double target = 1.0 - epsilon;
  const double log_mu = std::log(mu);
  double cdf = 0.0;
  for (int n = 0;; ++n) {
    cdf += std::exp(-mu + n * log_mu - std::lgamma(n + 1.0));
    if (cdf >= target) return n;
    // Past the mode the remaining mass is below epsilon long before this.
    if (n > 10 * mu + 1000) return n;
  }
}

int poisson_truncation(double lambda, double v, double T, double epsilon) {
  return poisson_truncation(lambda * v * T, epsilon);
}

SegmentPlan canonical_plan(const LinkScene& scene, double t0, double t1, int crossings,
                           double mean_street) {
  const double w = scene.street_width;
  if (crossings <= 0 || !(t1 > t0) || !(scene.motion.speed > 0.0)) {
    return SegmentPlan(t0, t1, w);
  }
  const Uav& u = scene.uav;
  const double v = scene.motion.speed;
  const double dy = u.y - scene.motion.start.y;
  // Speed of the far-edge crossing point relative to the user.
  const double sweep = 1.0 - far_edge_ratio(scene);
  const double spacing = (t1 - t0) / (crossings + 1);
  const double pass = mean_street / (v * sweep);

  std::vector<Gap> gaps;
  gaps.reserve(static_cast<std::size_t>(crossings));
  for (int i = 1; i <= crossings; ++i) {
    const double ta = t0 + i * spacing;
    const double next = i < crossings ? ta + spacing : t1;
    const double tb = std::min(ta + pass, next);
    const double xt = scene.motion.position(ta).x;
    const double west = xt + (u.x - xt) * (w / dy);
    gaps.push_back({west, west + (tb - ta) * v * sweep});
  }
  return plan_from_gaps(scene.motion, u, w, gaps, t0, t1);
}

ExpectedLosResult expected_los_total(const GridParams& params, const UserMotion& motion,
                                     const Uav& u, double street_width, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(motion.speed >= 0.0)) throw std::invalid_argument("speed must be nonnegative");
  ExpectedLosResult out;
  out.epsilon = epsilon;
  out.window = coverage_window(motion, u);
  const double t0 = out.window.t0;
  const double t1 = out.window.t1;
  const double length = out.window.length();

  const double dy = u.y - motion.start.y;
  if (dy < 0.0) throw GeometryError("UAV must lie on the far side of the user's street");
  if (out.window.empty() || dy <= street_width) {
    // Nothing to integrate, or the link never leaves the user's street.
    const double value = out.window.empty() ? 0.0 : length;
    out.value = value;
    out.per_ell.push_back({0, value, 1.0});
    out.weight_mass = 1.0;
    return out;
  }

  const LinkScene scene{motion, u, street_width, params.lambda(), HeightModel::rayleigh(params.sigma())};
  const double mu = params.lambda() * motion.speed * length;
  out.n = poisson_truncation(mu, epsilon);

  double weighted = 0.0;
  double mass = 0.0;
  for (int ell = 0; ell <= out.n; ++ell) {
    const double weight =
        mu == 0.0 ? (ell == 0 ? 1.0 : 0.0)
                  : std::exp(-mu + ell * std::log(mu) - std::lgamma(ell + 1.0));
    const SegmentPlan plan = canonical_plan(scene, t0, t1, ell, params.mu_s());
    const double expected = expected_los_theorem1(plan, scene);
    out.per_ell.push_back({ell, expected, weight});
    weighted += weight * expected;
    mass += weight;
  }
  out.weight_mass = mass;
  out.value = weighted / mass;
  return out;
}

double expected_los_sampled_layouts(const GridParams& params, const UserMotion& motion,
                                    const Uav& u, double street_width, int samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  const CoverageWindow window = coverage_window(motion, u);
  if (window.empty()) return 0.0;
  const double dy = u.y - motion.start.y;
  if (dy <= street_width) return window.length();

  const LinkScene scene{motion, u, street_width, params.lambda(), HeightModel::rayleigh(params.sigma())};
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const UrbanGrid grid = sample_grid(params, trial_seed(seed, static_cast<std::uint64_t>(k)),
                                       StreetAnchor{motion.start.y, street_width});
    const auto gaps = far_row_gaps(grid);
    std::vector<GapEvent> events;
    if (motion.speed > 0.0) {
      sum += expected_los_theorem1(
          plan_from_gaps(motion, u, street_width, gaps, window.t0, window.t1), scene);
      continue;
    }
    const double cross = far_edge_crossing(motion.start, u, street_width).point.x;
    for (const Gap& gap : gaps) {
      if (cross >= gap.west && cross <= gap.east) {
        events.push_back({window.t0, window.t1, gap});
        break;
      }
    }
    sum += expected_los_theorem1(SegmentPlan(window.t0, window.t1, street_width, events), scene);
  }
  return sum / samples;
}

}  // namespace uavlos
