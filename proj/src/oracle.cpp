#include "uavlos/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "uavlos/analytic.hpp"
#include "uavlos/seeding.hpp"

namespace uavlos {
namespace {

// Cells whose building may meet the closed box [lo, hi] on one axis.
std::pair<std::size_t, std::size_t> cell_range(const std::vector<double>& pts, double lo, double hi) {
  if (pts.size() < 2) return {0, 0};
  auto first = std::upper_bound(pts.begin(), pts.end(), lo);
  std::size_t begin = first == pts.begin() ? 0 : static_cast<std::size_t>(first - pts.begin()) - 1;
  auto last = std::lower_bound(pts.begin(), pts.end(), hi);
  std::size_t end = std::min(static_cast<std::size_t>(last - pts.begin()), pts.size() - 1);
  return {begin, std::max(begin, end)};
}

double sample_stderr(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace

bool is_los(const UrbanGrid& grid, Vec2 g, const Uav& u) {
  if (grid.inside_building(g)) throw GeometryError("user position lies inside a building");
  bool blocked = false;
  walk_buildings(grid, g, u.ground(), [&](const BuildingCrossing& c) {
    const double roof = grid.height(c.i, c.j);
    const double limit = std::min(1.0, roof / u.h);
    if (limit > 0.0 && c.s_in <= limit) {
      blocked = true;
      return false;
    }
    return true;
  });
  return !blocked;
}

std::optional<Interval> blocking_interval(const Rect& r, double height, const UserMotion& motion,
                                          const Uav& u, double t0, double t1) {
  if (!(t1 > t0)) return std::nullopt;
  const double y0 = motion.start.y;
  const double dy = u.y - y0;
  const double c = std::min(height / u.h, 1.0);
  if (dy == 0.0 || !(c > 0.0)) return std::nullopt;

  // The link blocks exactly when its part below the roof, i.e. the points
  // g_t + k (u - g_t) for k in (0, c], meets the footprint. Each k sits at a
  // fixed y and moves along x at speed v (1 - k).
  double k1 = (r.y0 - y0) / dy;
  double k2 = (r.y1 - y0) / dy;
  if (k1 > k2) std::swap(k1, k2);
  if (k2 <= 0.0) return std::nullopt;
  const double kl = std::max(k1, 0.0);
  const double kh = std::min(k2, c);
  if (kl > kh) return std::nullopt;

  const double x0 = motion.start.x;
  const double span = u.x - x0;
  const double v = motion.speed;
  if (v == 0.0) {
    const double xa = x0 + kl * span;
    const double xb = x0 + kh * span;
    if (std::max(xa, xb) < r.x0 || std::min(xa, xb) > r.x1) return std::nullopt;
    return Interval{t0, t1};
  }
  // Entry and exit times at level k are monotone in k, so the union over
  // [kl, kh] is spanned by the two end levels.
  auto window_at = [&](double k) {
    k = std::min(k, 1.0 - 1e-12);
    const double den = v * (1.0 - k);
    return Interval{(r.x0 - x0 - k * span) / den, (r.x1 - x0 - k * span) / den};
  };
  const Interval lo = window_at(kl);
  const Interval hi = window_at(kh);
  const double start = std::max(std::min(lo.start, hi.start), t0);
  const double end = std::min(std::max(lo.end, hi.end), t1);
  if (!(end >= start)) return std::nullopt;
  return Interval{start, end};
}

LosIntervalSet los_time(const UrbanGrid& grid, const UserMotion& motion, const Uav& u) {
  LosIntervalSet out;
  out.window = coverage_window(motion, u);
  if (out.window.empty()) return out;
  const double t0 = out.window.t0;
  const double t1 = out.window.t1;

  const Vec2 a = motion.position(t0);
  const Vec2 b = motion.position(t1);
  const double bx0 = std::min({a.x, b.x, u.x});
  const double bx1 = std::max({a.x, b.x, u.x});
  const double by0 = std::min({a.y, b.y, u.y});
  const double by1 = std::max({a.y, b.y, u.y});

  std::vector<Interval> blocked;
  if (grid.x_cells() > 0 && grid.y_cells() > 0) {
    const auto [i0, i1] = cell_range(grid.x_points(), bx0, bx1);
    const auto [j0, j1] = cell_range(grid.y_points(), by0, by1);
    for (std::size_t i = i0; i < i1; ++i) {
      for (std::size_t j = j0; j < j1; ++j) {
        if (auto iv = blocking_interval(grid.building(i, j), grid.height(i, j), motion, u, t0, t1)) {
          blocked.push_back(*iv);
        }
      }
    }
  }
  std::sort(blocked.begin(), blocked.end(),
            [](const Interval& l, const Interval& r) { return l.start < r.start; });

  double cursor = t0;
  for (const Interval& iv : blocked) {
    if (iv.start > cursor) out.intervals.push_back({cursor, iv.start});
    cursor = std::max(cursor, iv.end);
  }
  if (t1 > cursor) out.intervals.push_back({cursor, t1});
  for (const Interval& iv : out.intervals) out.total += iv.length();
  return out;
}

double los_time_sampled(const UrbanGrid& grid, const UserMotion& motion, const Uav& u, double dt) {
  const CoverageWindow w = coverage_window(motion, u);
  if (w.empty()) return 0.0;
  // Midpoint samples of consecutive dt cells.
  const auto steps = static_cast<std::uint64_t>(std::ceil(w.length() / dt));
  double total = 0.0;
  for (std::uint64_t k = 0; k < steps; ++k) {
    const double lo = w.t0 + k * dt;
    const double hi = std::min(lo + dt, w.t1);
    if (is_los(grid, motion.position(0.5 * (lo + hi)), u)) total += hi - lo;
  }
  return total;
}

void parallel_for(std::uint64_t n, unsigned threads, const std::function<void(std::uint64_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(n, 1)));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

TrialStats monte_carlo_expected_los(const GridParams& params, const UserMotion& motion,
                                    const Uav& u, std::uint64_t trials, std::uint64_t seed,
                                    const McOptions& options) {
  if (trials < 1) throw std::invalid_argument("monte carlo needs at least one trial");
  const StreetAnchor anchor{motion.start.y, options.street_width};
  std::vector<double> totals(trials);
  std::vector<double> windows(trials);
  parallel_for(trials, options.threads, [&](std::uint64_t i) {
    const UrbanGrid grid = sample_grid(params, trial_seed(seed, i), anchor);
    const LosIntervalSet los = los_time(grid, motion, u);
    totals[i] = los.total;
    windows[i] = los.window.length();
  });

  double sum = 0.0;
  for (double t : totals) sum += t;
  TrialStats out;
  out.trials = trials;
  out.seed = seed;
  out.mean = sum / static_cast<double>(trials);
  out.std_error = sample_stderr(totals, out.mean);

  if (options.trial_log) {
    std::ostream& log = *options.trial_log;
    const auto precision = log.precision(17);
    for (std::uint64_t i = 0; i < trials; ++i) {
      log << "{" << options.log_fields << "\"trial\":" << i << ",\"seed\":" << trial_seed(seed, i)
          << ",\"los_total\":" << totals[i] << ",\"t_min\":" << windows[i] << "}\n";
    }
    log.precision(precision);
  }
  return out;
}

StaticAgreement monte_carlo_static_los(const GridParams& params, Vec2 g, const Uav& u,
                                       double street_width, std::uint64_t trials,
                                       std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monte carlo needs at least one trial");
  const StreetAnchor anchor{g.y, street_width};
  const HeightModel heights = HeightModel::rayleigh(params.sigma());
  std::vector<char> visible(trials);
  std::vector<double> conditional(trials);
  parallel_for(trials, 0, [&](std::uint64_t i) {
    const UrbanGrid grid = sample_grid(params, trial_seed(seed, i), anchor);
    visible[i] = is_los(grid, g, u) ? 1 : 0;
    conditional[i] = p_los_static(g, u, first_block_side(grid, g, u), params.lambda(), heights);
  });
  StaticAgreement out;
  out.trials = trials;
  double hits = 0.0;
  double p_sum = 0.0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    hits += visible[i];
    p_sum += conditional[i];
  }
  const double n = static_cast<double>(trials);
  out.los_fraction = hits / n;
  out.mean_conditional_p = p_sum / n;
  out.binomial_stderr = std::sqrt(out.los_fraction * (1.0 - out.los_fraction) / n);
  return out;
}

}  // namespace uavlos
