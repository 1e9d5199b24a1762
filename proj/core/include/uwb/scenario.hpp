#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uwb/dtdoa.hpp"
#include "uwb/geometry.hpp"
#include "uwb/io.hpp"
#include "uwb/montecarlo.hpp"
#include "uwb/solver.hpp"
#include "uwb/sync.hpp"
#include "uwb/uncertainty.hpp"

namespace uwb {

/// Piecewise-linear path walked at constant speed.
struct WalkPath {
  std::vector<Point> waypoints;
  double speed = 1.0;  // m/s

  [[nodiscard]] double length() const;
  /// Position and velocity after walking for `t` seconds; stops at the end.
  [[nodiscard]] std::pair<Point, Point> state_at(double t) const;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  bool placeholder_layout = false;  // coordinates are illustrative, not surveyed

  NetworkGeometry geometry;
  NetworkClocks clocks;
  ClockModel tag_clock;
  ScheduleConfig schedule;
  SyncConfig sync;
  TagRateSource tag_rate = TagRateSource::MasterPair;
  bool weighted = true;  // solver weights from predicted variances
  SolverOptions solver;

  std::vector<Point> static_positions;
  std::optional<WalkPath> walk;
  double duration = 60.0;           // s, walk cap
  std::size_t repetitions = 30000;  // per static position
  std::vector<double> range_bias;   // m per anchor, empty = none

  /// Throws InvalidArgument.
  void validate() const;
  [[nodiscard]] BroadcastSchedule broadcast_schedule() const;
};

/// 10 m x 8 m room, master and six anchors on the walls, 3 ppm clocks and
/// one-tick uniform timestamp noise. The layout is a placeholder.
Scenario default_room(std::uint64_t seed = 1);

/// JSON scenario (schema in the README). A seed override replaces the file's
/// seed before random clocks are drawn. Throws ConfigNotFound / ConfigParse.
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed = std::nullopt);
Scenario parse_scenario(std::string_view json_text, std::string_view origin = "<string>",
                        std::optional<std::uint64_t> seed = std::nullopt);
/// Resolved scenario as JSON (compact for indent < 0); parse_scenario of the
/// result reproduces s.
std::string to_json(const Scenario& s, int indent = -1);

/// Drives the protocol for one scenario: sync refreshes, shared broadcasts,
/// per-tag reception and measurement. Substreams are keyed by cycle and tag,
/// so results do not depend on the evaluation order.
class ProtocolSimulator {
 public:
  explicit ProtocolSimulator(const Scenario& scenario);

  [[nodiscard]] const BroadcastSchedule& schedule() const { return schedule_; }
  [[nodiscard]] const Scenario& scenario() const { return scenario_; }

  /// Sync states valid at ideal time t (recomputed when the epoch changes).
  std::span<const SyncState> syncs_at(Seconds t);
  std::vector<TransmittedFrame> broadcast(std::int64_t cycle);
  std::vector<ReceivedFrame> receive(std::span<const TransmittedFrame> frames, const TagState& tag,
                                     std::uint64_t tag_id, std::int64_t cycle);
  /// First-pair measurements with predicted variances.
  std::vector<DtdoaMeasurement> measure(std::span<const ReceivedFrame> frames, std::int64_t cycle);

  /// The two beacons of a sync epoch as seen by one anchor.
  [[nodiscard]] SyncObservation observe(std::size_t anchor, const SyncEpoch& epoch) const;

  /// Closed-form inputs of anchor i for a cycle.
  [[nodiscard]] NoiseBudget budget(std::size_t anchor, std::int64_t cycle) const;
  /// Predicted DTDoA variance of anchor i for a cycle (m^2).
  [[nodiscard]] double predicted_variance(std::size_t anchor, std::int64_t cycle) const;

  /// One complete cycle for one tag, solved. Solver errors propagate.
  PositionFix locate(const TagState& tag, std::uint64_t tag_id, std::int64_t cycle);

 private:
  Scenario scenario_;
  BroadcastSchedule schedule_;
  std::optional<std::int64_t> sync_index_;
  std::vector<SyncState> syncs_;
};

struct StaticPositionResult {
  Point truth;
  std::vector<Point> errors;  // fix - truth, successful repetitions only
  std::size_t failures = 0;
};

struct StaticResult {
  std::vector<StaticPositionResult> positions;
};

StaticResult run_static(const Scenario& scenario, std::size_t repetitions);

struct WalkSample {
  std::int64_t cycle = 0;
  double time = 0;
  Point truth;  // at the master's first transmission
  Point fix;
  bool ok = false;
};

struct WalkResult {
  std::vector<WalkSample> samples;
  std::size_t failures = 0;
};

WalkResult run_walk(const Scenario& scenario);

struct ScalabilityRow {
  std::size_t tags = 0;
  double cycle_duration = 0;  // s
  std::size_t frames_per_cycle = 0;
  std::size_t fixes = 0;
  double fixes_per_second_per_tag = 0;
};

/// Tags are placed at seeded positions inside the anchors' bounding box and
/// all listen to the same `cycles` broadcasts.
std::vector<ScalabilityRow> run_scalability(const Scenario& scenario,
                                            std::span<const std::size_t> tag_counts,
                                            std::size_t cycles = 1);

/// Header populated with the scenario's name, seed and resolved JSON.
OutputHeader scenario_header(const Scenario& s, std::string command);

/// position,rep,err_x_m,err_y_m
std::string static_errors_csv(const StaticResult& r, const OutputHeader& header);
/// Histograms of both error axes per position plus an SVG.
Figure static_histograms(const StaticResult& r, const OutputHeader& header, std::size_t bins = 60);
/// cycle,time_s,true_x_m,true_y_m,fix_x_m,fix_y_m,ok plus an SVG overlay.
Figure walk_track(const WalkResult& r, const Scenario& s, const OutputHeader& header);
std::string scalability_csv(std::span<const ScalabilityRow> rows, const OutputHeader& header);

}  // namespace uwb
