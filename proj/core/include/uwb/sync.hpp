#pragma once

#include <cstdint>

#include "uwb/clock.hpp"
#include "uwb/random.hpp"
#include "uwb/types.hpp"

namespace uwb {

/// Two master sync beacons as timestamped by the master (tx) and anchor (rx).
struct SyncObservation {
  Seconds master_tx_1 = 0;
  Seconds master_tx_2 = 0;
  Seconds anchor_rx_1 = 0;
  Seconds anchor_rx_2 = 0;
  Seconds tof_im = 0;  // surveyed master->anchor time of flight
};

/// Anchor-to-master conversion parameters. Immutable snapshot; replaced as a
/// whole at every refresh.
struct SyncState {
  Rate rel_rate = 1.0L;     // anchor rate / master rate
  Seconds rel_offset = 0;   // single or averaged estimate
  Seconds residual = 0;     // (1 - nu_i) / rel_rate * tof_im; diagnostics only
};

struct SyncConfig {
  Seconds interval = 10.0L;  // refresh period
  Seconds gap = 10.0L;       // spacing of the two beacons in one observation
  bool use_averaged_offset = true;
};

/// Ideal time of the first beacon feeding the state valid at time t.
struct SyncEpoch {
  std::int64_t index;
  Seconds first_beacon;
};
SyncEpoch sync_epoch_at(Seconds t, const SyncConfig& config);

/// (rx2 - rx1) / (tx2 - tx1). Throws ZeroInterval if tx2 == tx1.
Rate estimate_rel_rate(const SyncObservation& obs);

/// Offset from the first beacon: rx1 - rate * tx1 - tof.
Seconds estimate_rel_offset(const SyncObservation& obs, Rate rel_rate);

/// Offset from the delayed beacon: rx2 - rate * tx2 - tof.
Seconds estimate_rel_offset_delayed(const SyncObservation& obs, Rate rel_rate);

Seconds average_rel_offset(Seconds first, Seconds second);

/// Full estimate from one observation.
SyncState synchronize(const SyncObservation& obs, bool use_averaged_offset = true);

/// (anchor_ts - offset) / rate: an anchor reading mapped to the master scale.
Seconds to_master_timescale(Seconds anchor_ts, const SyncState& state);

/// Conversion residual left by a perfect sync: (1 - nu_i) / rel_rate * tof.
Seconds conversion_residual(double anchor_rate, Rate rel_rate, Seconds tof_im);

/// Tag syntonization: tag receive interval over the master-scale transmit
/// interval of the same sender. Throws ZeroInterval on equal transmit stamps.
Rate estimate_tag_rate(Seconds tag_rx_1, Seconds tag_rx_2, Seconds master_ts_1,
                         Seconds master_ts_2);

/// Simulates the two beacons sent at ideal times epoch and epoch + gap.
SyncObservation observe_sync(const ClockModel& master, const ClockModel& anchor, Seconds tof_im,
                             Seconds epoch, Seconds gap, RandomStream& rng);

}  // namespace uwb
