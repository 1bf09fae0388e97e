#pragma once

#include "uavlos/types.hpp"

namespace uavlos {

/// Part of [0, epoch] during which the user is inside the UAV's 2D
/// coverage disk. Empty windows have t1 == t0.
struct CoverageWindow {
  double t0 = 0.0;
  double t1 = 0.0;

  double length() const { return t1 - t0; }
  bool empty() const { return !(t1 > t0); }
};

CoverageWindow coverage_window(const UserMotion& motion, const Uav& u);

/// T_min: time the user spends inside the coverage disk during the epoch.
/// Returns 0 when d3d <= h.
double coverage_time(const UserMotion& motion, const Uav& u);

}  // namespace uavlos
