#include "uavlos/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace uavlos {

double erf_diff(double a, double b) {
  if (a == b) return 0.0;
  if ((a > 0.0) == (b > 0.0) && a != 0.0 && b != 0.0) {
    // Same sign: difference of tails, unless the tails nearly cancel, in
    // which case the density is flat enough for direct quadrature.
    const double lo = std::min(std::abs(a), std::abs(b));
    const double hi = std::max(std::abs(a), std::abs(b));
    const double near = std::erfc(lo);
    const double far = std::erfc(hi);
    if (far > 0.5 * near) {
      auto density = [](double t) { return std::exp(-t * t); };
      return std::numbers::inv_sqrtpi * 2.0 *
             boost::math::quadrature::gauss<double, 20>::integrate(density, b, a);
    }
    // erf(a) - erf(b) has the sign of a - b.
    return a > b ? near - far : far - near;
  }
  return std::erf(a) - std::erf(b);
}

GenericHeights GenericHeights::tabulated(std::vector<double> h, std::vector<double> f) {
  if (h.size() != f.size() || h.empty()) throw std::invalid_argument("tabulated CDF: bad knots");
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (f[k] < 0.0 || f[k] > 1.0) throw std::invalid_argument("tabulated CDF: value outside [0, 1]");
    if (k > 0 && (!(h[k] > h[k - 1]) || f[k] < f[k - 1])) {
      throw std::invalid_argument("tabulated CDF: knots must increase and values be nondecreasing");
    }
  }
  return {[h = std::move(h), f = std::move(f)](double x) {
    if (x < h.front()) return 0.0;
    if (x >= h.back()) return f.back();
    auto it = std::upper_bound(h.begin(), h.end(), x);
    const auto k = static_cast<std::size_t>(it - h.begin());
    const double s = (x - h[k - 1]) / (h[k] - h[k - 1]);
    return f[k - 1] + s * (f[k] - f[k - 1]);
  }};
}

HeightModel HeightModel::rayleigh(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("rayleigh sigma must be positive");
  return HeightModel(RayleighHeights{sigma});
}

HeightModel HeightModel::generic(std::function<double(double)> cdf) {
  return HeightModel(GenericHeights{std::move(cdf)});
}

HeightModel HeightModel::generic(GenericHeights g) { return HeightModel(std::move(g)); }

double HeightModel::sigma() const {
  if (auto* r = std::get_if<RayleighHeights>(&kind_)) return r->sigma;
  throw std::logic_error("height model is not Rayleigh");
}

double HeightModel::cdf(double h) const {
  if (auto* r = std::get_if<RayleighHeights>(&kind_)) {
    if (!(h > 0.0)) return 0.0;
    return -std::expm1(-h * h / (2.0 * r->sigma * r->sigma));
  }
  return std::get<GenericHeights>(kind_).cdf(h);
}

HeightModel HeightModel::as_generic() const {
  if (!is_rayleigh()) return *this;
  const double s = sigma();
  return generic([s](double h) {
    if (!(h > 0.0)) return 0.0;
    return -std::expm1(-h * h / (2.0 * s * s));
  });
}

std::optional<double> contact_ratio(Vec2 c, Vec2 g, const Uav& u) {
  const double dx = std::abs(u.x - g.x);
  const double dy = std::abs(u.y - g.y);
  if (dx == 0.0 && dy == 0.0) return std::nullopt;
  const double r = dx >= dy ? std::abs(c.x - g.x) / dx : std::abs(c.y - g.y) / dy;
  return std::clamp(r, 0.0, 1.0);
}

std::optional<double> los_height_at(Vec2 c, Vec2 g, const Uav& u) {
  auto r = contact_ratio(c, g, u);
  if (!r) return std::nullopt;
  return u.h * *r;
}

double p0_los(double h1, const HeightModel& model) { return model.cdf(h1); }

double los_coefficient(double ratio, double h_u, double lambda, double sigma) {
  if (lambda == 0.0) return 0.0;
  const double k = h_u / (std::numbers::sqrt2 * sigma);
  const double r = std::clamp(ratio, 0.0, 1.0);
  return -lambda * std::sqrt(std::numbers::pi / 2.0) * (sigma / h_u) * erf_diff(k, k * r);
}

LosCoefficients los_coefficients(Vec2 g, const Uav& u, Vec2 c, double lambda, double sigma) {
  const double dx = std::abs(u.x - g.x);
  const double dy = std::abs(u.y - g.y);
  LosCoefficients out{0.0, 0.0};
  if (dx > 0.0) out.a = los_coefficient(std::abs(c.x - g.x) / dx, u.h, lambda, sigma);
  if (dy > 0.0) out.b = los_coefficient(std::abs(c.y - g.y) / dy, u.h, lambda, sigma);
  return out;
}

namespace {

// -lambda * integral over the oriented interval between the contact and the
// UAV of P(building taller than the link).
double void_exponent(double g0, double c0, double u0, double h_u, double lambda,
                     const HeightModel& model) {
  const double extent = std::abs(u0 - g0);
  if (extent == 0.0 || lambda == 0.0) return 0.0;
  const double lo = std::min(c0, u0);
  const double hi = std::max(c0, u0);
  if (!(hi > lo)) return 0.0;
  auto taller = [&](double s) { return 1.0 - model.cdf(h_u * std::abs(s - g0) / extent); };
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(taller, lo, hi, 20, 1e-13, &err);
  return -lambda * integral;
}

}  // namespace

double p_los_static(Vec2 g, const Uav& u, const std::optional<FirstBlockSide>& contact,
                    double lambda, const HeightModel& model) {
  if (!contact) return 1.0;
  const Vec2 c = contact->point;
  const auto ratio = contact_ratio(c, g, u);
  if (!ratio) return 1.0;
  const double p0 = model.cdf(u.h * *ratio);
  if (p0 == 0.0) return 0.0;

  double exponent = 0.0;
  if (model.is_rayleigh()) {
    const LosCoefficients k = los_coefficients(g, u, c, lambda, model.sigma());
    exponent = k.a * std::abs(u.x - g.x) + k.b * std::abs(u.y - g.y);
  } else {
    exponent = void_exponent(g.x, c.x, u.x, u.h, lambda, model) +
               void_exponent(g.y, c.y, u.y, u.h, lambda, model);
  }
  return p0 * std::exp(exponent);
}

}  // namespace uavlos
