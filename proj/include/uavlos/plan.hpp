#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace uavlos {

/// Orientation of the first building wall hit by the projected link.
enum class Orientation {
  ParallelX,  // wall on a line y = const (the far edge of the user's street)
  ParallelY,  // wall on a line x = const (a building's side)
};

/// Street opening on the far edge of the user's street: the x-extent between
/// the east corner of one building and the west corner of the next.
/// Either end may be infinite where the row runs out of buildings.
struct Gap {
  double west = 0.0;
  double east = 0.0;
};

/// One pass of the projected link through a gap. While t is in [t_a, t_b]
/// the first blocking side is ParallelY; between passes it is ParallelX.
struct GapEvent {
  double t_a = 0.0;
  double t_b = 0.0;
  Gap gap;
};

struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  Orientation orientation = Orientation::ParallelX;
  std::optional<std::size_t> event;  // index into events() for ParallelY

  double length() const { return t1 - t0; }
};

/// Alternating ParallelX / ParallelY schedule of a user over a time window.
class SegmentPlan {
 public:
  /// Throws GeometryError unless t_start <= t_a1 <= t_b1 <= t_a2 <= ... <= t_end.
  SegmentPlan(double t_start, double t_end, double street_width, std::vector<GapEvent> events = {});

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double street_width() const { return street_width_; }
  const std::vector<GapEvent>& events() const { return events_; }

  /// Segments covering [t_start, t_end] in time order. Zero-length segments
  /// are dropped.
  std::vector<Segment> segments() const;

  /// Index of the event whose window contains t, if any.
  std::optional<std::size_t> event_at(double t) const;

 private:
  double t_start_;
  double t_end_;
  double street_width_;
  std::vector<GapEvent> events_;
};

}  // namespace uavlos
