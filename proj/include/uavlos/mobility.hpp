#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uavlos/analytic.hpp"
#include "uavlos/coverage.hpp"
#include "uavlos/env.hpp"
#include "uavlos/plan.hpp"

namespace uavlos {

/// Everything the expected-LoS integrand needs besides the segment plan.
struct LinkScene {
  UserMotion motion;
  Uav uav;
  double street_width;  // distance from the user's line to the far street edge
  double lambda;        // 1/m
  HeightModel heights;
};

/// p(t) = base * exp(a * v * t) on a segment whose first blocking side is
/// ParallelX. v is signed: positive while the user recedes from the UAV's
/// x-coordinate, negative while approaching it.
double p_los_x_segment(double t, double base, double a, double v);

/// Integral of p_los_x_segment over [0, duration].
double expected_los_x_segment(double base, double a, double v, double duration);

/// First contact of the projected link at time t on a ParallelY segment of
/// the given gap pass. nullopt when the link reaches the UAV's ground point
/// before the gap's side wall.
std::optional<FirstBlockSide> gap_contact(const LinkScene& scene, const Gap& gap, double t);

/// LoS probability at absolute time t while the link passes through the gap.
double p_los_y_segment(double t, const LinkScene& scene, const Gap& gap);

/// Three-point Simpson estimate of the LoS time over [t0, t1] of a gap pass.
double expected_los_y_segment(const LinkScene& scene, const Gap& gap, double t0, double t1);

/// Composite Simpson reference with `nodes` points (odd, >= 3).
double expected_los_y_segment_reference(const LinkScene& scene, const Gap& gap, double t0,
                                        double t1, int nodes = 129);

/// LoS probability at time t under the plan's contact schedule.
double p_los_at(const LinkScene& scene, const SegmentPlan& plan, double t);

/// Expected LoS time over the plan's window: closed form on ParallelX
/// segments (split where the user passes below the UAV), Simpson on
/// ParallelY segments, each segment re-based at its start.
double expected_los_theorem1(const SegmentPlan& plan, const LinkScene& scene);

/// Same sum with every ParallelY segment integrated by the composite
/// reference rule.
double expected_los_theorem1_reference(const SegmentPlan& plan, const LinkScene& scene,
                                       int nodes = 129);

/// Smallest n with Poisson(mu) CDF(n) >= 1 - epsilon.
int poisson_truncation(double mu, double epsilon);
int poisson_truncation(double lambda, double v, double T, double epsilon);

/// Deterministic layout with `crossings` gap passes over [t0, t1]: pass i
/// opens at t0 + i (t1 - t0) / (crossings + 1) and lasts as long as it takes
/// the link to sweep a street of width mean_street, cut short by the next
/// pass or the window end.
SegmentPlan canonical_plan(const LinkScene& scene, double t0, double t1, int crossings,
                           double mean_street);

struct EllTerm {
  int ell;
  double expected;  // s
  double weight;    // Poisson probability before renormalization
};

struct ExpectedLosResult {
  double value = 0.0;  // s
  std::vector<EllTerm> per_ell;
  int n = 0;
  double epsilon = 1e-3;
  double weight_mass = 0.0;  // sum of weights before renormalization
  CoverageWindow window;
};

constexpr double kDefaultEpsilon = 1e-3;

/// Expected LoS time over the coverage window [0, T_min]: Poisson-weighted
/// average over the number of gap passes, truncated at N and renormalized.
/// street_width is the user's distance to the far street edge.
ExpectedLosResult expected_los_total(const GridParams& params, const UserMotion& motion,
                                     const Uav& u, double street_width,
                                     double epsilon = kDefaultEpsilon);

/// Alternative marginalization: the realized-gap expectation averaged over
/// `samples` sampled cities sharing the user's street.
double expected_los_sampled_layouts(const GridParams& params, const UserMotion& motion,
                                    const Uav& u, double street_width, int samples,
                                    std::uint64_t seed);

}  // namespace uavlos
