#include "uavlos/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace uavlos {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return true;
}

std::optional<std::size_t> cell_of(const std::vector<double>& pts, double c) {
  if (pts.size() < 2 || c < pts.front() || c >= pts.back()) return std::nullopt;
  auto it = std::upper_bound(pts.begin(), pts.end(), c);
  return static_cast<std::size_t>(it - pts.begin()) - 1;
}

std::vector<double> poisson_points(std::mt19937_64& rng, double rate, double lo, double hi) {
  std::vector<double> pts;
  if (!(hi > lo) || !(rate > 0.0)) return pts;
  std::poisson_distribution<long long> count(rate * (hi - lo));
  std::uniform_real_distribution<double> where(lo, hi);
  const long long n = count(rng);
  pts.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) pts.push_back(where(rng));
  return pts;
}

// Liang-Barsky clip of a + s (b - a), s in [0, 1], against a closed rectangle.
struct Clip {
  double s_lo;
  double s_hi;
  Orientation entry;
};

std::optional<Clip> clip_segment(Vec2 a, Vec2 b, const Rect& r) {
  // Parameter interval of one slab; the whole line when the segment is
  // parallel to it and inside.
  auto slab = [](double p, double d, double mn, double mx) -> std::optional<std::pair<double, double>> {
    if (d == 0.0) {
      if (p < mn || p > mx) return std::nullopt;
      return std::pair{-kInf, kInf};
    }
    double t1 = (mn - p) / d;
    double t2 = (mx - p) / d;
    if (t1 > t2) std::swap(t1, t2);
    return std::pair{t1, t2};
  };
  auto sx = slab(a.x, b.x - a.x, r.x0, r.x1);
  if (!sx) return std::nullopt;
  auto sy = slab(a.y, b.y - a.y, r.y0, r.y1);
  if (!sy) return std::nullopt;
  const double lo = std::max({0.0, sx->first, sy->first});
  const double hi = std::min({1.0, sx->second, sy->second});
  if (lo > hi) return std::nullopt;
  // Walls on x = const are parallel to Y.
  const Orientation entry = sx->first >= sy->first ? Orientation::ParallelY : Orientation::ParallelX;
  return Clip{lo, hi, entry};
}

// Extended cell index: -1 before the first point, n-1 at or after the last.
long axis_slot(const std::vector<double>& pts, double c) {
  return static_cast<long>(std::upper_bound(pts.begin(), pts.end(), c) - pts.begin()) - 1;
}

}  // namespace

GridParams GridParams::make(double mu_b, double mu_s, double sigma, Region region) {
  if (!(mu_b > 0.0) || !(mu_s > 0.0) || !(sigma > 0.0)) {
    throw std::invalid_argument("grid params: mu_b, mu_s and sigma must be positive");
  }
  if (!(region.width() > 0.0) || !(region.height() > 0.0)) {
    throw std::invalid_argument("grid params: region must have positive extent");
  }
  GridParams p;
  p.mu_b_ = mu_b;
  p.mu_s_ = mu_s;
  p.sigma_ = sigma;
  p.region_ = region;
  p.lambda_ = 1.0 / (mu_b + mu_s);
  return p;
}

UrbanGrid::UrbanGrid(std::vector<double> x_points, std::vector<double> y_points,
                     std::vector<double> block_heights, double street_fraction)
    : xs_(std::move(x_points)),
      ys_(std::move(y_points)),
      heights_(std::move(block_heights)),
      street_fraction_(street_fraction) {
  if (!strictly_increasing(xs_) || !strictly_increasing(ys_)) {
    throw std::invalid_argument("urban grid: axis points must be strictly increasing");
  }
  if (!(street_fraction_ > 0.0 && street_fraction_ < 1.0)) {
    throw std::invalid_argument("urban grid: street fraction must lie in (0, 1)");
  }
  if (heights_.size() != x_cells() * y_cells()) {
    throw std::invalid_argument("urban grid: height matrix does not match the cell count");
  }
  for (double h : heights_) {
    if (!(h >= 0.0)) throw std::invalid_argument("urban grid: negative building height");
  }
}

double UrbanGrid::x_building_start(std::size_t i) const {
  return xs_[i] + street_fraction_ * (xs_[i + 1] - xs_[i]);
}

double UrbanGrid::y_building_start(std::size_t j) const {
  return ys_[j] + street_fraction_ * (ys_[j + 1] - ys_[j]);
}

Rect UrbanGrid::building(std::size_t i, std::size_t j) const {
  return {x_building_start(i), xs_[i + 1], y_building_start(j), ys_[j + 1]};
}

std::optional<std::size_t> UrbanGrid::x_cell(double x) const { return cell_of(xs_, x); }
std::optional<std::size_t> UrbanGrid::y_cell(double y) const { return cell_of(ys_, y); }

bool UrbanGrid::inside_building(Vec2 p) const {
  auto i = x_cell(p.x);
  auto j = y_cell(p.y);
  if (!i || !j) return false;
  Rect r = building(*i, *j);
  return p.x > r.x0 && p.x < r.x1 && p.y > r.y0 && p.y < r.y1;
}

double UrbanGrid::street_width_at(Vec2 g) const {
  auto j = y_cell(g.y);
  if (!j) throw GeometryError("user is not on a street bounded by buildings");
  double far = y_building_start(*j);
  if (!(g.y < far)) throw GeometryError("user is not on an X-parallel street");
  return far - g.y;
}

UrbanGrid sample_grid(const GridParams& params, std::uint64_t seed,
                      std::optional<StreetAnchor> anchor) {
  const Region& reg = params.region();
  if (std::min(reg.width(), reg.height()) < params.mu_s()) {
    throw DegenerateGridError("region is narrower than one street");
  }
  const double frac = params.street_fraction();
  std::mt19937_64 rng(seed);

  std::vector<double> xs = poisson_points(rng, params.lambda(), reg.x_min, reg.x_max);
  std::vector<double> ys;
  if (anchor) {
    if (!(anchor->street_width > 0.0) || anchor->y < reg.y_min ||
        anchor->y + anchor->street_width > reg.y_max) {
      throw DegenerateGridError("anchored street does not fit in the region");
    }
    // The anchored cell is [y, y + w / frac]; memorylessness lets the rest
    // of the axis be sampled independently on either side.
    const double top = anchor->y + anchor->street_width / frac;
    ys = poisson_points(rng, params.lambda(), reg.y_min, anchor->y);
    auto above = poisson_points(rng, params.lambda(), top, reg.y_max);
    ys.insert(ys.end(), above.begin(), above.end());
    ys.push_back(anchor->y);
    ys.push_back(top);
  } else {
    ys = poisson_points(rng, params.lambda(), reg.y_min, reg.y_max);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  const std::size_t nx = xs.size() < 2 ? 0 : xs.size() - 1;
  const std::size_t ny = ys.size() < 2 ? 0 : ys.size() - 1;
  std::vector<double> heights(nx * ny);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& h : heights) {
    // Inverse Rayleigh CDF; 1 - u lies in (0, 1].
    h = params.sigma() * std::sqrt(-2.0 * std::log1p(-unit(rng)));
  }
  return UrbanGrid(std::move(xs), std::move(ys), std::move(heights), frac);
}

FirstBlockSide far_edge_crossing(Vec2 g, const Uav& u, double w) {
  const double dy = u.y - g.y;
  if (!(w > 0.0) || !(dy > w)) throw GeometryError("UAV does not lie beyond the far street edge");
  return {{g.x + (u.x - g.x) * (w / dy), g.y + w}, Orientation::ParallelX};
}

void walk_buildings(const UrbanGrid& grid, Vec2 a, Vec2 b,
                    const std::function<bool(const BuildingCrossing&)>& visit) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  if (dx == 0.0 && dy == 0.0) return;
  const auto& xs = grid.x_points();
  const auto& ys = grid.y_points();
  const long nxc = static_cast<long>(grid.x_cells());
  const long nyc = static_cast<long>(grid.y_cells());

  long ix = axis_slot(xs, a.x);
  long iy = axis_slot(ys, a.y);
  const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);

  auto next_param = [](const std::vector<double>& pts, long slot, int step, double p0, double d) {
    if (step == 0) return kInf;
    long k = step > 0 ? slot + 1 : slot;
    if (k < 0 || k >= static_cast<long>(pts.size())) return kInf;
    return (pts[static_cast<std::size_t>(k)] - p0) / d;
  };

  while (true) {
    if (ix >= 0 && ix < nxc && iy >= 0 && iy < nyc) {
      const auto i = static_cast<std::size_t>(ix);
      const auto j = static_cast<std::size_t>(iy);
      if (auto c = clip_segment(a, b, grid.building(i, j)); c && c->s_hi > 0.0) {
        BuildingCrossing hit{i, j, std::max(c->s_lo, 0.0), std::min(c->s_hi, 1.0), c->entry};
        if (!visit(hit)) return;
      }
    }
    const double tx = next_param(xs, ix, sx, a.x, dx);
    const double ty = next_param(ys, iy, sy, a.y, dy);
    const double t = std::min(tx, ty);
    if (!(t < 1.0)) return;
    if (tx <= t) ix += sx;
    if (ty <= t) iy += sy;
  }
}

std::optional<FirstBlockSide> first_block_side(const UrbanGrid& grid, Vec2 g, const Uav& u) {
  if (grid.inside_building(g)) throw GeometryError("user position lies inside a building");
  std::optional<FirstBlockSide> out;
  const Vec2 b = u.ground();
  walk_buildings(grid, g, b, [&](const BuildingCrossing& c) {
    if (c.s_in <= 0.0) throw GeometryError("user stands on a wall the link enters");
    out = FirstBlockSide{{g.x + c.s_in * (b.x - g.x), g.y + c.s_in * (b.y - g.y)}, c.entry_wall};
    return false;
  });
  return out;
}

EventPoints event_points(const Gap& gap, Vec2 g, const Uav& u, double w) {
  const double dy = u.y - g.y;
  if (!(w > 0.0) || !(dy > w)) throw GeometryError("UAV does not lie beyond the far street edge");
  auto solve = [&](double corner) {
    if (std::isinf(corner)) return corner;
    return (dy * corner - w * u.x) / (dy - w);
  };
  return {solve(gap.west), solve(gap.east)};
}

SegmentPlan plan_from_gaps(const UserMotion& motion, const Uav& u, double street_width,
                           const std::vector<Gap>& gaps, double t0, double t1) {
  if (!(motion.speed > 0.0)) throw GeometryError("corner events need a positive speed");
  std::vector<GapEvent> events;
  for (const Gap& gap : gaps) {
    EventPoints ev = event_points(gap, motion.start, u, street_width);
    double ta = (ev.a - motion.start.x) / motion.speed;
    double tb = (ev.b - motion.start.x) / motion.speed;
    ta = std::max(ta, t0);
    tb = std::min(tb, t1);
    if (tb > ta) events.push_back({ta, tb, gap});
  }
  std::sort(events.begin(), events.end(),
            [](const GapEvent& l, const GapEvent& r) { return l.t_a < r.t_a; });
  // Round-off in the corner solve must not make adjacent passes overlap.
  for (std::size_t k = 1; k < events.size(); ++k) {
    events[k].t_a = std::max(events[k].t_a, events[k - 1].t_b);
    events[k].t_b = std::max(events[k].t_b, events[k].t_a);
  }
  return SegmentPlan(t0, t1, street_width, std::move(events));
}

std::vector<Gap> far_row_gaps(const UrbanGrid& grid) {
  const auto& xs = grid.x_points();
  std::vector<Gap> gaps;
  if (xs.size() < 2) {
    gaps.push_back({-kInf, kInf});
    return gaps;
  }
  const std::size_t n = grid.x_cells();
  gaps.push_back({-kInf, grid.x_building_start(0)});
  for (std::size_t i = 1; i < n; ++i) gaps.push_back({xs[i], grid.x_building_start(i)});
  gaps.push_back({xs.back(), kInf});
  return gaps;
}

SegmentPlan corner_events(const UrbanGrid& grid, const UserMotion& motion, const Uav& u) {
  const double w = grid.street_width_at(motion.start);
  return plan_from_gaps(motion, u, w, far_row_gaps(grid), 0.0, motion.epoch);
}

}  // namespace uavlos
