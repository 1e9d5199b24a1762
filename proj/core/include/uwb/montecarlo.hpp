#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uwb/clock.hpp"
#include "uwb/io.hpp"
#include "uwb/types.hpp"
#include "uwb/uncertainty.hpp"

namespace uwb {

enum class McTarget { Gamma, GammaDelayed, GammaBar, Epsilon, EpsilonCorr, Xi, Phi, Lambda };
inline constexpr std::size_t kMcTargetCount = 8;

std::string_view to_string(McTarget target);
/// Accepts gamma, gamma-delayed, gamma-bar, epsilon, epsilon-corr, xi, phi, lambda.
std::optional<McTarget> parse_target(std::string_view name);

struct McConfig {
  std::size_t trials = 10000;
  std::size_t anchors = 10;
  std::uint64_t seed = 42;
  NoiseDistribution noise = NoiseDistribution::Gaussian;
  /// Uniform half-width; Gaussian noise uses sigma = half_width / 3 so that
  /// 99.7% of its mass falls inside the same support.
  double half_width = 15.65e-12;

  double offset_max = 1e-3;     // |offset| bound, s
  double rate_ppm_max = 10.0;   // |rate - 1| bound, ppm
  double box = 20.0;            // positions in [0, box]^2, m
  double interval_min = 1e-4;   // Delta_i and Delta_im range, s
  double interval_max = 1e-2;
  double cycle_delay_max = 1e-2;  // t_m - (sync end), s
  double min_separation = 1.0;    // m, closer nodes are redrawn
  double c = kSpeedOfLight;

  /// Throws InvalidArgument.
  void validate() const;
  [[nodiscard]] NoiseSpec noise_spec() const;
  /// Parameter ranges as header key/values.
  void describe(OutputHeader& header) const;
};

/// One randomized anchor configuration. The master and tag are shared by all
/// anchors of a run.
struct McSetup {
  ClockModel master, anchor, tag;
  Point master_pos, anchor_pos, tag_pos;
  double sync_gap = 0;    // = slot offset
  double slot_offset = 0;
  double pair_gap = 0;
  double master_tx_time = 0;
  NoiseBudget budget;
};

/// Per-anchor statistics of one target. For EpsilonCorr the spread fields
/// hold covariances (s^2) instead of standard deviations.
struct McAnchorResult {
  std::size_t anchor = 0;
  double truth = 0;
  double empirical_mean = 0;   // mean error
  double standard_error = 0;   // empirical_std / sqrt(trials)
  double empirical_std = 0;
  double analytic_std = 0;
  double analytic_std_literal = 0;
  double rel_err_mean_pct = 0; // NaN for EpsilonCorr
  double rel_err_std_pct = 0;
};

struct McBatch {
  McConfig config;
  std::size_t first_trial = 0;
  std::size_t trial_count = 0;
  std::size_t degenerate_draws = 0;
  std::vector<McSetup> setups;
  std::array<std::vector<McAnchorResult>, kMcTargetCount> results;
  /// Error samples of the first anchor, per target (EpsilonCorr holds the
  /// second conversion error).
  std::array<std::vector<double>, kMcTargetCount> first_anchor_samples;

  [[nodiscard]] std::span<const McAnchorResult> of(McTarget t) const {
    return results[static_cast<std::size_t>(t)];
  }
  [[nodiscard]] std::span<const double> samples(McTarget t) const {
    return first_anchor_samples[static_cast<std::size_t>(t)];
  }
};

/// Draws the anchor configurations; DegenerateDraw rejects are redrawn and
/// counted in `degenerate`.
std::vector<McSetup> draw_setups(const McConfig& cfg, std::size_t& degenerate);

/// Runs trials [first_trial, first_trial + trial_count) for every anchor and
/// every target. Trial k's draws depend only on (seed, anchor, k).
McBatch run_mc_all(const McConfig& cfg, std::size_t first_trial = 0,
                   std::optional<std::size_t> trial_count = std::nullopt);

struct McRun {
  McTarget target = McTarget::Gamma;
  std::size_t degenerate_draws = 0;
  std::vector<McAnchorResult> anchors;
  std::vector<double> first_anchor_samples;
};
McRun run_mc(const McConfig& cfg, McTarget target);

/// CSV of one target: anchor,truth,empirical_mean,standard_error,
/// empirical_std,analytic_std,analytic_std_literal,rel_err_mean_pct,rel_err_std_pct
std::string mc_csv(std::span<const McAnchorResult> rows, const OutputHeader& header);

struct Figure {
  std::string csv;
  std::string svg;
};

/// Relative-error table for the three offset estimators plus a bar chart.
Figure emit_offset_errors(std::span<const McAnchorResult> gamma, std::span<const McAnchorResult> delayed,
                 std::span<const McAnchorResult> bar, const OutputHeader& header);

/// Side-by-side histograms of first-anchor DTDoA errors (m) under two noise
/// families; the reference sigmas draw normal overlays.
Figure emit_error_histograms(std::span<const double> gaussian_errors, double gaussian_sigma,
                 std::span<const double> uniform_errors, double uniform_sigma,
                 const OutputHeader& header, std::size_t bins = 50);

}  // namespace uwb
