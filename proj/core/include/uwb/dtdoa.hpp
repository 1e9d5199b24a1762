#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "uwb/clock.hpp"
#include "uwb/geometry.hpp"
#include "uwb/random.hpp"
#include "uwb/sync.hpp"

namespace uwb {

inline constexpr int kMasterId = 0;  // anchors are 1..n

enum class PairIndex { First = 0, Second = 1 };

struct ScheduleConfig {
  Seconds slot_spacing = 400e-6L;
  Seconds pair_gap = 200e-6L;
  Seconds guard = 50e-6L;
  Seconds min_cycle = 15e-3L;
};

/// Downlink broadcast plan. Times are relative to the cycle start; the master
/// transmits first, anchors follow in id order.
struct BroadcastSchedule {
  Seconds master_first_tx = 0;
  Seconds master_pair_gap = 0;
  std::vector<Seconds> slot_offsets;  // t_i - t_m per anchor
  std::vector<Seconds> pair_gaps;     // per anchor
  Seconds guard = 0;
  Seconds cycle_period = 0;

  /// Depends on the anchor count and the config only, never on tags.
  static BroadcastSchedule make_default(std::size_t anchors, const ScheduleConfig& config = {});

  /// Throws ScheduleOverlap / InvalidArgument.
  void validate() const;

  [[nodiscard]] std::size_t anchor_count() const { return slot_offsets.size(); }
  [[nodiscard]] std::size_t frames_per_cycle() const { return 2 * (anchor_count() + 1); }
  [[nodiscard]] Seconds cycle_start(std::int64_t cycle) const {
    return static_cast<Seconds>(cycle) * cycle_period;
  }
  [[nodiscard]] Seconds tx_offset(int source, PairIndex pair) const;
  [[nodiscard]] Seconds last_tx_offset() const;
  [[nodiscard]] double update_rate_hz() const { return 1.0 / static_cast<double>(cycle_period); }
};

struct NetworkClocks {
  ClockModel master;
  std::vector<ClockModel> anchors;
};

/// A frame as sent; shared by every listening tag.
struct TransmittedFrame {
  int source = kMasterId;
  PairIndex pair = PairIndex::First;
  Seconds tx_true = 0;       // ideal send time
  Seconds tx_master_ts = 0;  // sender stamp on the master timescale
};

struct ReceivedFrame {
  int source = kMasterId;
  PairIndex pair = PairIndex::First;
  Seconds tx_master_ts = 0;
  Seconds rx_tag_ts = 0;
};

/// One range-difference observable relative to the master, in meters.
struct DtdoaMeasurement {
  std::size_t anchor = 0;          // 0-based anchor index
  double value = 0.0;
  double predicted_variance = 0.0; // m^2, 0 when unknown
  // Debug decomposition of the noiseless value, NaN unless annotated.
  double ideal_term = std::numeric_limits<double>::quiet_NaN();
  double bias_term = std::numeric_limits<double>::quiet_NaN();
};

enum class TagRateSource { MasterPair, PerAnchor };

/// Transmissions of one cycle: every sender stamps its two frames with its
/// noisy clock; anchor stamps are mapped to the master scale with `syncs`.
std::vector<TransmittedFrame> broadcast_cycle(const NetworkClocks& clocks,
                                              const BroadcastSchedule& schedule,
                                              std::span<const SyncState> syncs,
                                              Seconds cycle_start, RandomStream& rng);

/// Tag-side reception. The tag (state at cycle_start) moves along its
/// velocity; each frame arrives after the ToF from the tag position at send
/// time, plus an optional per-anchor range bias (meters). Throws
/// ScheduleOverlap if two arrivals fall within the guard time.
std::vector<ReceivedFrame> receive_cycle(const NetworkGeometry& geometry,
                                         const BroadcastSchedule& schedule,
                                         std::span<const TransmittedFrame> frames,
                                         const TagState& tag, Seconds cycle_start,
                                         RandomStream& rng,
                                         std::span<const double> range_bias = {});

std::vector<ReceivedFrame> simulate_cycle(const NetworkGeometry& geometry,
                                          const NetworkClocks& clocks, const TagState& tag,
                                          const BroadcastSchedule& schedule,
                                          std::span<const SyncState> syncs, Seconds cycle_start,
                                          RandomStream& rng);

/// g = tag_rate * (anchor master-scale stamp - master stamp).
Seconds protocol_interval(const ReceivedFrame& anchor_frame, const ReceivedFrame& master_frame,
                          Rate tag_rate);

/// c * (rx_anchor - rx_master - g).
DtdoaMeasurement compute_dtdoa(const ReceivedFrame& anchor_frame,
                               const ReceivedFrame& master_frame, Seconds g, double c);

/// nu * (rho_i - rho_m): the simultaneous-transmission reference observable.
double ideal_tdoa(const TagState& tag, Point anchor, const NetworkGeometry& geometry);

/// Looks up a frame in a received cycle; throws InvalidArgument if missing.
const ReceivedFrame& find_frame(std::span<const ReceivedFrame> frames, int source,
                                PairIndex pair);

/// Tag rate from the master pair or from anchor `source`'s pair.
Rate tag_rate_from_pair(std::span<const ReceivedFrame> frames, int source);

/// Turns one received cycle into one measurement per anchor.
std::vector<DtdoaMeasurement> measure_cycle(std::span<const ReceivedFrame> frames,
                                            std::size_t anchors, double c,
                                            TagRateSource rate_source = TagRateSource::MasterPair,
                                            PairIndex pair = PairIndex::First);

/// Fills ideal_term / bias_term from ground truth (static tag).
void annotate_truth(std::vector<DtdoaMeasurement>& measurements, const TagState& tag,
                    const NetworkGeometry& geometry, const NetworkClocks& clocks);

struct FrameLogRow {
  std::int64_t cycle = 0;
  ReceivedFrame frame;
};

/// CSV: cycle,source,pair,tx_master_ts_s,rx_tag_ts_s (18 significant digits).
void write_frames_csv(std::ostream& out, std::span<const FrameLogRow> rows);

}  // namespace uwb
