#include "uavlos/coverage.hpp"

#include <algorithm>
#include <cmath>

namespace uavlos {

CoverageWindow coverage_window(const UserMotion& motion, const Uav& u) {
  const double radius = u.coverage_radius();
  const double T = motion.epoch;
  if (!(radius > 0.0)) return {0.0, 0.0};
  if (std::isinf(radius)) return {0.0, T};

  const double ox = motion.start.x - u.x;
  const double oy = motion.start.y - u.y;
  const double v = motion.speed;
  const double slack = radius * radius - oy * oy;
  if (slack < 0.0) return {0.0, 0.0};
  if (v == 0.0) {
    if (ox * ox <= slack) return {0.0, T};
    return {0.0, 0.0};
  }
  // (ox + v t)^2 <= slack
  const double half = std::sqrt(slack);
  double t_in = (-half - ox) / v;
  double t_out = (half - ox) / v;
  t_in = std::clamp(t_in, 0.0, T);
  t_out = std::clamp(t_out, 0.0, T);
  if (!(t_out > t_in)) return {t_in, t_in};
  return {t_in, t_out};
}

double coverage_time(const UserMotion& motion, const Uav& u) {
  return coverage_window(motion, u).length();
}

}  // namespace uavlos
