#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uwb/dtdoa.hpp"
#include "uwb/geometry.hpp"

namespace uwb {

struct SolverOptions {
  std::size_t max_iterations = 50;
  double step_tolerance = 1e-10;      // m
  double gradient_tolerance = 1e-12;
  double initial_damping = 1e-3;
  bool multi_start = false;           // centroid plus four perturbed starts
  double max_condition = 1e12;        // of J^T J at the solution
  /// When set, receives the weighted cost at the start and after every
  /// accepted step.
  std::vector<double>* cost_trace = nullptr;
};

struct PositionFix {
  Point position;
  double residual_norm = 0;   // unweighted, m
  std::size_t iterations = 0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // (J^T W J)^-1, m^2
  double pdop = 0;
  bool converged = false;
};

/// Weighted least squares on value_i = |p - a_i| - |p - m| via
/// Levenberg-Marquardt. Weights are 1/predicted_variance where positive,
/// else 1. Throws Degenerate (fewer than 2 measurements, singular normal
/// equations) or NoConvergence.
PositionFix solve(std::span<const DtdoaMeasurement> measurements, const NetworkGeometry& geometry,
                  std::optional<Point> initial_guess = std::nullopt,
                  const SolverOptions& options = {});

/// sqrt(trace((H^T H)^-1)), rows of H the range-difference gradients at
/// `query`. Throws Degenerate.
double pdop(const NetworkGeometry& geometry, Point query, double max_condition = 1e12);

struct Bounds {
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
};

/// Cell-centered samples; row-major with y outer. Singular cells hold NaN and
/// are flagged in `singular`.
struct PdopMap {
  double x0 = 0, y0 = 0, dx = 0, dy = 0;
  std::size_t nx = 0, ny = 0;
  std::vector<double> values;
  std::vector<bool> singular;

  [[nodiscard]] Point center(std::size_t ix, std::size_t iy) const {
    return {x0 + (static_cast<double>(ix) + 0.5) * dx, y0 + (static_cast<double>(iy) + 0.5) * dy};
  }
  [[nodiscard]] double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

/// Throws InvalidArgument on resolution <= 0 or an empty rectangle.
PdopMap pdop_map(const NetworkGeometry& geometry, const Bounds& bounds, double resolution);

}  // namespace uwb
