#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace uavlos {

/// Raised when a query or construction receives geometry it cannot handle
/// (user inside a building, UAV below the far street edge, ...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a grid cannot be sampled for the requested region.
class DegenerateGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned simulation extent in meters.
struct Region {
  double x_min = -200.0;
  double x_max = 200.0;
  double y_min = -200.0;
  double y_max = 200.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }

  /// Square region of the given side centered on the origin.
  static Region centered(double width, double height) {
    return {-width / 2, width / 2, -height / 2, height / 2};
  }
};

/// Distribution parameters of a Manhattan city. Construct through make() so
/// that lambda = 1 / (mu_b + mu_s) always holds.
class GridParams {
 public:
  static GridParams make(double mu_b, double mu_s, double sigma, Region region = {});

  double lambda() const { return lambda_; }
  double mu_b() const { return mu_b_; }
  double mu_s() const { return mu_s_; }
  double sigma() const { return sigma_; }
  const Region& region() const { return region_; }

  /// Share of every inter-point cell occupied by the street band.
  double street_fraction() const { return mu_s_ / (mu_b_ + mu_s_); }

 private:
  GridParams() = default;

  double lambda_ = 0.0;
  double mu_b_ = 0.0;
  double mu_s_ = 0.0;
  double sigma_ = 0.0;
  Region region_;
};

/// Ground user moving along +X at constant speed over [0, epoch].
struct UserMotion {
  Vec2 start;
  double speed = 0.0;   // m/s
  double epoch = 10.0;  // s

  Vec2 position(double t) const { return {start.x + speed * t, start.y}; }
};

struct Uav {
  double x = 0.0;
  double y = 0.0;
  double h = 100.0;
  double d3d = std::numeric_limits<double>::infinity();

  Vec2 ground() const { return {x, y}; }

  /// Radius of the ground disk the UAV can serve; 0 when d3d <= h.
  double coverage_radius() const {
    if (!(d3d > h)) return 0.0;
    if (std::isinf(d3d)) return d3d;
    return std::sqrt(d3d * d3d - h * h);
  }
};

}  // namespace uavlos
