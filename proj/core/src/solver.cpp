#include "uwb/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "uwb/error.hpp"

namespace uwb {
namespace {

struct Problem {
  std::span<const DtdoaMeasurement> meas;
  const NetworkGeometry& geo;
  std::vector<double> weights;
};

Eigen::RowVector2d unit(Point from, Point to) {
  const Point d = from - to;
  const double n = d.norm();
  if (n == 0.0) return Eigen::RowVector2d::Zero();
  return {d.x / n, d.y / n};
}

// r_i = value_i - (|p - a_i| - |p - m|); J = dr/dp.
void linearize(const Problem& pb, Point p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
  const std::size_t n = pb.meas.size();
  r.resize(static_cast<Eigen::Index>(n));
  J.resize(static_cast<Eigen::Index>(n), 2);
  const Eigen::RowVector2d um = unit(p, pb.geo.master);
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = pb.geo.anchors.at(pb.meas[k].anchor);
    const auto row = static_cast<Eigen::Index>(k);
    r(row) = pb.meas[k].value - (distance(p, a) - distance(p, pb.geo.master));
    J.row(row) = -(unit(p, a) - um);
  }
}

double cost(const Problem& pb, Point p) {
  double s = 0;
  for (std::size_t k = 0; k < pb.meas.size(); ++k) {
    const Point a = pb.geo.anchors.at(pb.meas[k].anchor);
    const double r = pb.meas[k].value - (distance(p, a) - distance(p, pb.geo.master));
    s += pb.weights[k] * r * r;
  }
  return s;
}

double condition(const Eigen::Matrix2d& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(1);
  if (!(lo > 0) || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

PositionFix solve_from(const Problem& pb, Point start, const SolverOptions& opt) {
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
      pb.weights.data(), static_cast<Eigen::Index>(pb.weights.size()));

  PositionFix fix;
  Point p = start;
  double f = cost(pb, p);
  double lambda = opt.initial_damping;
  if (opt.cost_trace) opt.cost_trace->push_back(f);
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    fix.iterations = it;
    linearize(pb, p, r, J);
    const Eigen::Matrix2d A = J.transpose() * w.asDiagonal() * J;
    const Eigen::Vector2d g = J.transpose() * w.asDiagonal() * r;
    if (g.norm() < opt.gradient_tolerance || f == 0.0) {
      fix.converged = true;
      break;
    }
    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix2d damped = A;
      damped.diagonal() += lambda * A.diagonal().cwiseMax(1e-300);
      const Eigen::Vector2d step = damped.ldlt().solve(-g);
      if (!step.allFinite()) throw Error(ErrorCode::Degenerate, "normal equations are singular");
      const Point q{p.x + step(0), p.y + step(1)};
      const double fq = cost(pb, q);
      if (fq <= f) {
        p = q;
        f = fq;
        if (opt.cost_trace) opt.cost_trace->push_back(f);
        lambda /= 10;
        accepted = true;
      } else {
        lambda *= 10;
      }
      if (step.norm() < opt.step_tolerance) {
        fix.converged = true;
        break;
      }
      if (!accepted && lambda > 1e30) {
        fix.converged = true;  // no descent direction left at working precision
        break;
      }
    }
    if (fix.converged) break;
  }
  if (!fix.converged) {
    throw Error(ErrorCode::NoConvergence,
                "no convergence after " + std::to_string(opt.max_iterations) + " iterations");
  }

  linearize(pb, p, r, J);
  const Eigen::Matrix2d JtJ = J.transpose() * J;
  if (condition(JtJ) > opt.max_condition) {
    throw Error(ErrorCode::Degenerate, "anchor geometry is degenerate at the solution");
  }
  fix.position = p;
  fix.residual_norm = r.norm();
  fix.covariance = (J.transpose() * w.asDiagonal() * J).inverse();
  fix.covariance = 0.5 * (fix.covariance + fix.covariance.transpose()).eval();
  fix.pdop = std::sqrt(JtJ.inverse().trace());
  return fix;
}

}  // namespace

PositionFix solve(std::span<const DtdoaMeasurement> measurements, const NetworkGeometry& geometry,
                  std::optional<Point> initial_guess, const SolverOptions& options) {
  if (measurements.size() < 2) {
    throw Error(ErrorCode::Degenerate, "need at least 2 measurements for a 2-D fix");
  }
  Problem pb{measurements, geometry, {}};
  pb.weights.reserve(measurements.size());
  for (const DtdoaMeasurement& m : measurements) {
    if (m.anchor >= geometry.anchors.size()) {
      throw Error(ErrorCode::InvalidArgument, "measurement references unknown anchor");
    }
    if (!std::isfinite(m.value)) throw Error(ErrorCode::InvalidArgument, "non-finite measurement");
    pb.weights.push_back(m.predicted_variance > 0 ? 1.0 / m.predicted_variance : 1.0);
  }

  const Point centroid = geometry.centroid();
  const Point start = initial_guess.value_or(centroid);
  if (!options.multi_start) return solve_from(pb, start, options);

  double extent = 0;
  for (const Point& a : geometry.anchors) extent = std::max(extent, distance(a, centroid));
  const double h = extent / 4;
  const Point starts[] = {start, start + Point{h, 0}, start + Point{-h, 0}, start + Point{0, h},
                          start + Point{0, -h}};
  std::optional<PositionFix> best;
  double best_cost = 0;
  for (const Point& s : starts) {
    try {
      PositionFix fix = solve_from(pb, s, options);
      const double c = cost(pb, fix.position);
      if (!best || c < best_cost) {
        best = fix;
        best_cost = c;
      }
    } catch (const Error&) {
      // another start may still succeed
    }
  }
  if (!best) return solve_from(pb, start, options);
  return *best;
}

double pdop(const NetworkGeometry& geometry, Point query, double max_condition) {
  if (distance(query, geometry.master) == 0.0) {
    throw Error(ErrorCode::Degenerate, "query coincides with the master");
  }
  Eigen::MatrixXd H(static_cast<Eigen::Index>(geometry.anchors.size()), 2);
  const Eigen::RowVector2d um = unit(query, geometry.master);
  for (std::size_t k = 0; k < geometry.anchors.size(); ++k) {
    if (distance(query, geometry.anchors[k]) == 0.0) {
      throw Error(ErrorCode::Degenerate, "query coincides with an anchor");
    }
    H.row(static_cast<Eigen::Index>(k)) = unit(query, geometry.anchors[k]) - um;
  }
  const Eigen::Matrix2d HtH = H.transpose() * H;
  if (geometry.anchors.size() < 2 || condition(HtH) > max_condition) {
    throw Error(ErrorCode::Degenerate, "H^T H is singular at the query point");
  }
  return std::sqrt(HtH.inverse().trace());
}

PdopMap pdop_map(const NetworkGeometry& geometry, const Bounds& b, double resolution) {
  if (!(resolution > 0)) throw Error(ErrorCode::InvalidArgument, "resolution must be > 0");
  const double w = b.x_max - b.x_min;
  const double h = b.y_max - b.y_min;
  if (!(w > 0) || !(h > 0)) throw Error(ErrorCode::InvalidArgument, "bounds must be non-empty");
  PdopMap map;
  map.nx = static_cast<std::size_t>(std::max(1.0, std::round(w / resolution)));
  map.ny = static_cast<std::size_t>(std::max(1.0, std::round(h / resolution)));
  map.x0 = b.x_min;
  map.y0 = b.y_min;
  map.dx = w / static_cast<double>(map.nx);
  map.dy = h / static_cast<double>(map.ny);
  map.values.resize(map.nx * map.ny);
  map.singular.resize(map.nx * map.ny);
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      const std::size_t k = iy * map.nx + ix;
      try {
        map.values[k] = pdop(geometry, map.center(ix, iy));
      } catch (const Error&) {
        map.values[k] = std::numeric_limits<double>::quiet_NaN();
        map.singular[k] = true;
      }
    }
  }
  return map;
}

}  // namespace uwb
