#include "uwb/geometry.hpp"

#include <string>

#include "uwb/error.hpp"

namespace uwb {

void NetworkGeometry::validate(std::size_t min_anchors) const {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "propagation speed must be > 0");
  if (anchors.size() < min_anchors) {
    throw Error(ErrorCode::InvalidArgument, "need at least " + std::to_string(min_anchors) +
                                                " anchors, got " + std::to_string(anchors.size()));
  }
  if (!master.finite()) throw Error(ErrorCode::InvalidArgument, "master position not finite");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (!anchors[i].finite()) {
      throw Error(ErrorCode::InvalidArgument, "anchor " + std::to_string(i + 1) + " not finite");
    }
    if (anchors[i] == master) {
      throw Error(ErrorCode::InvalidArgument,
                  "anchor " + std::to_string(i + 1) + " coincides with the master");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (anchors[i] == anchors[j]) {
        throw Error(ErrorCode::InvalidArgument, "anchors " + std::to_string(j + 1) + " and " +
                                                    std::to_string(i + 1) + " coincide");
      }
    }
  }
}

Point NetworkGeometry::centroid() const {
  Point sum;
  for (const Point& a : anchors) sum = sum + a;
  return anchors.empty() ? master : (1.0 / static_cast<double>(anchors.size())) * sum;
}

Seconds NetworkGeometry::anchor_tof(std::size_t i) const { return tof(master, anchors.at(i), c); }

double distance(Point p, Point q) { return (p - q).norm(); }

Seconds tof(Point p, Point q, double c) {
  return static_cast<Seconds>(distance(p, q)) / static_cast<Seconds>(c);
}

TagState propagate(const TagState& tag, Seconds dt) {
  TagState next = tag;
  next.position = tag.position + static_cast<double>(dt) * tag.velocity;
  return next;
}

TofBounds tof_motion_bound(const TagState& tag, Point anchor, Seconds dt, double c) {
  const Seconds base = tof(tag.position, anchor, c);
  const Seconds swing =
      static_cast<Seconds>((static_cast<double>(dt) * tag.velocity).norm()) / static_cast<Seconds>(c);
  return {base - swing, base + swing};
}

}  // namespace uwb
