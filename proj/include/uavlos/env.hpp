#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "uavlos/plan.hpp"
#include "uavlos/types.hpp"

namespace uavlos {

/// Axis-aligned building footprint.
struct Rect {
  double x0, x1, y0, y1;
};

/// One realized Manhattan city.
///
/// Consecutive points on an axis bound a cell. Each cell is split into a
/// street band at its low-coordinate side (street_fraction of the cell) and a
/// building band at its high side. The building of cell (i, j) occupies the
/// product of the two building bands. Space outside the first and last point
/// of an axis carries no buildings.
class UrbanGrid {
 public:
  UrbanGrid(std::vector<double> x_points, std::vector<double> y_points,
            std::vector<double> block_heights, double street_fraction);

  const std::vector<double>& x_points() const { return xs_; }
  const std::vector<double>& y_points() const { return ys_; }
  const std::vector<double>& block_heights() const { return heights_; }
  double street_fraction() const { return street_fraction_; }

  std::size_t x_cells() const { return xs_.size() < 2 ? 0 : xs_.size() - 1; }
  std::size_t y_cells() const { return ys_.size() < 2 ? 0 : ys_.size() - 1; }

  double height(std::size_t i, std::size_t j) const { return heights_[i * y_cells() + j]; }
  Rect building(std::size_t i, std::size_t j) const;

  /// Start of the building band of x-cell i (end of its street band).
  double x_building_start(std::size_t i) const;
  double y_building_start(std::size_t j) const;

  /// Cell index containing the coordinate, or nullopt outside [first, last).
  std::optional<std::size_t> x_cell(double x) const;
  std::optional<std::size_t> y_cell(double y) const;

  /// True when p lies in the open interior of some building footprint.
  bool inside_building(Vec2 p) const;

  /// Distance from g to the far (high-y) edge of the X-parallel street
  /// containing g. Throws GeometryError when g is not on such a street.
  double street_width_at(Vec2 g) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> heights_;
  double street_fraction_;
};

/// Forces a street band [y, y + street_width] into the sampled y-axis so a
/// user can stand on its near edge.
struct StreetAnchor {
  double y = 0.0;
  double street_width = 10.0;
};

/// Samples a city: Poisson point counts per axis with mean lambda * extent,
/// uniform point positions, Rayleigh(sigma) block heights. Deterministic in
/// (params, seed, anchor). Throws DegenerateGridError if the region cannot
/// hold a street.
UrbanGrid sample_grid(const GridParams& params, std::uint64_t seed,
                      std::optional<StreetAnchor> anchor = std::nullopt);

/// First building wall crossed by the projected user-UAV link.
struct FirstBlockSide {
  Vec2 point;
  Orientation orientation;
};

/// Crossing of the projected link with the far edge y = g.y + w of the user's
/// street, assuming a wall sits there. The UAV must be beyond that edge.
FirstBlockSide far_edge_crossing(Vec2 g, const Uav& u, double w);

/// First wall of the realized grid crossed by the 2D segment from g to the
/// UAV's ground point, or nullopt when no building is crossed.
std::optional<FirstBlockSide> first_block_side(const UrbanGrid& grid, Vec2 g, const Uav& u);

/// A building crossed by a 2D segment a -> b, with the entry parameter
/// s_in in [0, 1] and the exit parameter s_out.
struct BuildingCrossing {
  std::size_t i;
  std::size_t j;
  double s_in;
  double s_out;
  Orientation entry_wall;
};

/// Walks the grid cells along a -> b and reports every crossed building in
/// order of entry. Contact at the start point alone (s_out == 0) is not a
/// crossing. Return false from the callback to stop the walk.
void walk_buildings(const UrbanGrid& grid, Vec2 a, Vec2 b,
                    const std::function<bool(const BuildingCrossing&)>& visit);

/// Gap passes of the projected link during the epoch for a realized grid.
/// The user's street width is read from the grid; gaps are the vertical
/// street openings of the building row beyond the far edge. Times are
/// clipped to [0, epoch]. Throws GeometryError when the UAV does not lie
/// beyond the far street edge or the speed is not positive.
SegmentPlan corner_events(const UrbanGrid& grid, const UserMotion& motion, const Uav& u);

/// Street openings of the building row beyond the far edge of the user's
/// X-parallel street, including the unbuilt space outside the sampled points.
std::vector<Gap> far_row_gaps(const UrbanGrid& grid);

/// Same construction for an explicit list of gaps and window [t0, t1].
SegmentPlan plan_from_gaps(const UserMotion& motion, const Uav& u, double street_width,
                           const std::vector<Gap>& gaps, double t0, double t1);

/// User x-positions at which the projected link touches the gap's west and
/// east corners on the far street edge (A and B event points).
struct EventPoints {
  double a;
  double b;
};
EventPoints event_points(const Gap& gap, Vec2 g, const Uav& u, double w);

}  // namespace uavlos
