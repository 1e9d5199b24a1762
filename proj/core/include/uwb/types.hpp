#pragma once

#include <cmath>
#include <limits>

namespace uwb {

/// Clock readings and protocol times. Extended precision: a 1e-9 m range
/// budget is 3.3e-18 s, below double resolution for ms-scale timestamps.
using Seconds = long double;

static_assert(std::numeric_limits<Seconds>::digits >= 64,
              "uwb::Seconds needs at least a 64-bit mantissa");

/// Estimated clock-rate ratios share the extended precision of Seconds.
using Rate = long double;

using Meters = double;

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Timestamp resolution of a 64 GHz UWB transceiver counter.
inline constexpr double kTickSeconds = 15.65e-12;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;

  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

}  // namespace uwb
