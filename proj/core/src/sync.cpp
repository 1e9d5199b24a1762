#include "uwb/sync.hpp"

#include <cmath>

#include "uwb/error.hpp"

namespace uwb {

SyncEpoch sync_epoch_at(Seconds t, const SyncConfig& config) {
  if (!(config.interval > 0) || !(config.gap > 0)) {
    throw Error(ErrorCode::ZeroInterval, "sync interval and gap must be > 0");
  }
  const auto index = static_cast<std::int64_t>(std::floor(t / config.interval));
  return {index, static_cast<Seconds>(index) * config.interval - config.gap};
}

Rate estimate_rel_rate(const SyncObservation& obs) {
  const Seconds den = obs.master_tx_2 - obs.master_tx_1;
  if (den == 0) throw Error(ErrorCode::ZeroInterval, "sync beacons share a master timestamp");
  return (obs.anchor_rx_2 - obs.anchor_rx_1) / den;
}

Seconds estimate_rel_offset(const SyncObservation& obs, Rate rel_rate) {
  return obs.anchor_rx_1 - rel_rate * obs.master_tx_1 - obs.tof_im;
}

Seconds estimate_rel_offset_delayed(const SyncObservation& obs, Rate rel_rate) {
  return obs.anchor_rx_2 - rel_rate * obs.master_tx_2 - obs.tof_im;
}

Seconds average_rel_offset(Seconds first, Seconds second) { return (first + second) / 2; }

SyncState synchronize(const SyncObservation& obs, bool use_averaged_offset) {
  SyncState state;
  state.rel_rate = estimate_rel_rate(obs);
  const Seconds first = estimate_rel_offset(obs, state.rel_rate);
  state.rel_offset =
      use_averaged_offset
          ? average_rel_offset(first, estimate_rel_offset_delayed(obs, state.rel_rate))
          : first;
  return state;
}

Seconds to_master_timescale(Seconds anchor_ts, const SyncState& state) {
  return (anchor_ts - state.rel_offset) / state.rel_rate;
}

Seconds conversion_residual(double anchor_rate, Rate rel_rate, Seconds tof_im) {
  return (1.0L - static_cast<Seconds>(anchor_rate)) / rel_rate * tof_im;
}

Rate estimate_tag_rate(Seconds tag_rx_1, Seconds tag_rx_2, Seconds master_ts_1,
                         Seconds master_ts_2) {
  const Seconds den = master_ts_2 - master_ts_1;
  if (den == 0) throw Error(ErrorCode::ZeroInterval, "frame pair shares a transmit timestamp");
  return (tag_rx_2 - tag_rx_1) / den;
}

SyncObservation observe_sync(const ClockModel& master, const ClockModel& anchor, Seconds tof_im,
                             Seconds epoch, Seconds gap, RandomStream& rng) {
  SyncObservation obs;
  obs.tof_im = tof_im;
  obs.master_tx_1 = read_measured(master, epoch, rng);
  obs.master_tx_2 = read_measured(master, epoch + gap, rng);
  obs.anchor_rx_1 = read_measured(anchor, epoch + tof_im, rng);
  obs.anchor_rx_2 = read_measured(anchor, epoch + gap + tof_im, rng);
  return obs;
}

}  // namespace uwb
