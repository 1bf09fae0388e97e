#include "uavlos/plan.hpp"

#include <cmath>
#include <utility>

#include "uavlos/types.hpp"

namespace uavlos {

SegmentPlan::SegmentPlan(double t_start, double t_end, double street_width,
                         std::vector<GapEvent> events)
    : t_start_(t_start), t_end_(t_end), street_width_(street_width), events_(std::move(events)) {
  if (!(t_end >= t_start)) throw GeometryError("segment plan: window end precedes start");
  if (!(street_width > 0.0)) throw GeometryError("segment plan: street width must be positive");
  double last = t_start;
  for (const auto& e : events_) {
    if (!(e.t_a >= last) || !(e.t_b >= e.t_a) || !(e.t_b <= t_end)) {
      throw GeometryError("segment plan: event times overlap or leave the window");
    }
    if (!(e.gap.east > e.gap.west)) throw GeometryError("segment plan: empty gap");
    last = e.t_b;
  }
}

std::vector<Segment> SegmentPlan::segments() const {
  std::vector<Segment> out;
  auto push = [&out](double t0, double t1, Orientation o, std::optional<std::size_t> ev) {
    if (t1 > t0) out.push_back({t0, t1, o, ev});
  };
  double t = t_start_;
  for (std::size_t k = 0; k < events_.size(); ++k) {
    push(t, events_[k].t_a, Orientation::ParallelX, std::nullopt);
    push(events_[k].t_a, events_[k].t_b, Orientation::ParallelY, k);
    t = events_[k].t_b;
  }
  push(t, t_end_, Orientation::ParallelX, std::nullopt);
  return out;
}

std::optional<std::size_t> SegmentPlan::event_at(double t) const {
  for (std::size_t k = 0; k < events_.size(); ++k) {
    if (t >= events_[k].t_a && t <= events_[k].t_b && events_[k].t_b > events_[k].t_a) return k;
  }
  return std::nullopt;
}

}  // namespace uavlos
