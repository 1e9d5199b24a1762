#pragma once

#include <cstddef>
#include <vector>

#include "uwb/clock.hpp"
#include "uwb/types.hpp"

namespace uwb {

/// Surveyed infrastructure: the master defines the network timescale, anchors
/// are indexed 0..n-1 (anchor id i+1 in logs).
struct NetworkGeometry {
  Point master;
  std::vector<Point> anchors;
  double c = kSpeedOfLight;

  /// Requires >= 3 anchors, finite positions, no coincident nodes, c > 0.
  void validate(std::size_t min_anchors = 3) const;

  [[nodiscard]] std::size_t size() const { return anchors.size(); }
  [[nodiscard]] Point centroid() const;
  /// Master-to-anchor propagation time.
  [[nodiscard]] Seconds anchor_tof(std::size_t i) const;
};

struct TagState {
  Point position;
  Point velocity;
  ClockModel clock;
};

struct TofBounds {
  Seconds lower;
  Seconds upper;
};

double distance(Point p, Point q);
Seconds tof(Point p, Point q, double c);

/// First-order kinematics: position advances by dt * velocity.
TagState propagate(const TagState& tag, Seconds dt);

/// Range of reachable ToFs to `anchor` after moving for dt: tof -+ |dt v| / c.
TofBounds tof_motion_bound(const TagState& tag, Point anchor, Seconds dt, double c);

}  // namespace uwb
