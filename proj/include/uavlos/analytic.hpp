#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "uavlos/env.hpp"
#include "uavlos/types.hpp"

namespace uavlos {

/// erf(a) - erf(b) without catastrophic cancellation.
///
/// std::erf / std::erfc come from the C library (glibc: the fdlibm rational
/// approximations, < 1 ulp). Close arguments are integrated directly with
/// 20-point Gauss-Legendre over [b, a]; arguments in the upper tail are
/// differenced through erfc.
double erf_diff(double a, double b);

struct RayleighHeights {
  double sigma;
};

/// Building heights with an arbitrary CDF.
struct GenericHeights {
  std::function<double(double)> cdf;

  /// Piecewise-linear CDF through (h_k, F_k); 0 before the first knot and
  /// F_last after the last. Knots must be increasing and F nondecreasing.
  static GenericHeights tabulated(std::vector<double> h, std::vector<double> f);
};

/// Distribution of building heights.
class HeightModel {
 public:
  static HeightModel rayleigh(double sigma);
  static HeightModel generic(std::function<double(double)> cdf);
  static HeightModel generic(GenericHeights g);

  bool is_rayleigh() const { return std::holds_alternative<RayleighHeights>(kind_); }
  double sigma() const;  // throws std::logic_error for generic models
  double cdf(double h) const;

  /// Same distribution routed through the generic numerical path.
  HeightModel as_generic() const;

 private:
  explicit HeightModel(std::variant<RayleighHeights, GenericHeights> k) : kind_(std::move(k)) {}

  std::variant<RayleighHeights, GenericHeights> kind_;
};

struct LosCoefficients {
  double a;  // 1/m, multiplies |x_u - x0|
  double b;  // 1/m, multiplies |y_u - y0|
};

/// LoS height of the user-UAV link above point c, or nullopt when the UAV is
/// straight above the user (no 2D extent).
std::optional<double> los_height_at(Vec2 c, Vec2 g, const Uav& u);

/// Probability that the first contact building is lower than h1.
double p0_los(double h1, const HeightModel& model);

/// Rayleigh void-probability exponents of the links beyond the first contact.
LosCoefficients los_coefficients(Vec2 g, const Uav& u, Vec2 c, double lambda, double sigma);

/// Coefficient for one axis given the contact ratio |c - g| / |u - g|.
double los_coefficient(double ratio, double h_u, double lambda, double sigma);

/// Static LoS probability for a user at g with the given first contact
/// (nullopt: nothing occludes the projected link, probability 1).
///
/// Rayleigh models use the erf closed form; generic models integrate the
/// void-probability exponents with adaptive Gauss-Kronrod quadrature.
double p_los_static(Vec2 g, const Uav& u, const std::optional<FirstBlockSide>& contact,
                    double lambda, const HeightModel& model);

/// Ratio |c - g| / |u - g| of a contact point, taken on the axis with the
/// larger 2D extent. nullopt when the link has no 2D extent.
std::optional<double> contact_ratio(Vec2 c, Vec2 g, const Uav& u);

}  // namespace uavlos
