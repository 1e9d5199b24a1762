#include "uwb/dtdoa.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "uwb/error.hpp"
#include "uwb/io.hpp"

namespace uwb {

BroadcastSchedule BroadcastSchedule::make_default(std::size_t anchors,
                                                  const ScheduleConfig& config) {
  if (anchors == 0) throw Error(ErrorCode::InvalidArgument, "schedule needs at least one anchor");
  BroadcastSchedule s;
  s.master_first_tx = 0;
  s.master_pair_gap = config.pair_gap;
  s.guard = config.guard;
  for (std::size_t i = 1; i <= anchors; ++i) {
    s.slot_offsets.push_back(static_cast<Seconds>(i) * config.slot_spacing);
    s.pair_gaps.push_back(config.pair_gap);
  }
  s.cycle_period = std::max(config.min_cycle, s.last_tx_offset() + config.pair_gap + config.guard);
  s.validate();
  return s;
}

Seconds BroadcastSchedule::tx_offset(int source, PairIndex pair) const {
  const bool second = pair == PairIndex::Second;
  if (source == kMasterId) return master_first_tx + (second ? master_pair_gap : 0);
  const auto i = static_cast<std::size_t>(source - 1);
  if (source < 0 || i >= slot_offsets.size()) {
    throw Error(ErrorCode::InvalidArgument, "unknown source id " + std::to_string(source));
  }
  return master_first_tx + slot_offsets[i] + (second ? pair_gaps[i] : 0);
}

Seconds BroadcastSchedule::last_tx_offset() const {
  Seconds last = tx_offset(kMasterId, PairIndex::Second);
  for (std::size_t i = 0; i < slot_offsets.size(); ++i) {
    last = std::max(last, tx_offset(static_cast<int>(i + 1), PairIndex::Second));
  }
  return last;
}

void BroadcastSchedule::validate() const {
  if (slot_offsets.empty()) throw Error(ErrorCode::InvalidArgument, "schedule has no anchors");
  if (pair_gaps.size() != slot_offsets.size()) {
    throw Error(ErrorCode::InvalidArgument, "pair gap count differs from slot count");
  }
  if (!(master_pair_gap > 0)) throw Error(ErrorCode::ZeroInterval, "master pair gap must be > 0");
  if (guard < 0) throw Error(ErrorCode::InvalidArgument, "guard time must be >= 0");
  std::vector<Seconds> tx;
  for (int source = 0; source <= static_cast<int>(slot_offsets.size()); ++source) {
    if (source > 0) {
      const auto i = static_cast<std::size_t>(source - 1);
      if (!(slot_offsets[i] > 0)) throw Error(ErrorCode::InvalidArgument, "slot offsets must be > 0");
      if (!(pair_gaps[i] > 0)) throw Error(ErrorCode::ZeroInterval, "pair gaps must be > 0");
    }
    tx.push_back(tx_offset(source, PairIndex::First));
    tx.push_back(tx_offset(source, PairIndex::Second));
  }
  std::sort(tx.begin(), tx.end());
  for (std::size_t k = 1; k < tx.size(); ++k) {
    if (tx[k] - tx[k - 1] < guard || tx[k] == tx[k - 1]) {
      throw Error(ErrorCode::ScheduleOverlap, "two transmissions closer than the guard time");
    }
  }
  if (!(cycle_period > tx.back())) {
    throw Error(ErrorCode::InvalidArgument, "cycle period must exceed the last transmission");
  }
}

std::vector<TransmittedFrame> broadcast_cycle(const NetworkClocks& clocks,
                                              const BroadcastSchedule& schedule,
                                              std::span<const SyncState> syncs,
                                              Seconds cycle_start, RandomStream& rng) {
  const std::size_t n = schedule.anchor_count();
  if (clocks.anchors.size() != n || syncs.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "clock/sync count differs from schedule anchors");
  }
  std::vector<TransmittedFrame> frames;
  frames.reserve(schedule.frames_per_cycle());
  for (int source = 0; source <= static_cast<int>(n); ++source) {
    for (PairIndex pair : {PairIndex::First, PairIndex::Second}) {
      TransmittedFrame f;
      f.source = source;
      f.pair = pair;
      f.tx_true = cycle_start + schedule.tx_offset(source, pair);
      if (source == kMasterId) {
        f.tx_master_ts = read_measured(clocks.master, f.tx_true, rng);
      } else {
        const auto i = static_cast<std::size_t>(source - 1);
        f.tx_master_ts = to_master_timescale(read_measured(clocks.anchors[i], f.tx_true, rng), syncs[i]);
      }
      frames.push_back(f);
    }
  }
  return frames;
}

std::vector<ReceivedFrame> receive_cycle(const NetworkGeometry& geometry,
                                         const BroadcastSchedule& schedule,
                                         std::span<const TransmittedFrame> frames,
                                         const TagState& tag, Seconds cycle_start,
                                         RandomStream& rng, std::span<const double> range_bias) {
  std::vector<ReceivedFrame> out;
  out.reserve(frames.size());
  std::vector<Seconds> arrivals;
  arrivals.reserve(frames.size());
  const auto c = static_cast<Seconds>(geometry.c);
  for (const TransmittedFrame& f : frames) {
    const Point sender = f.source == kMasterId
                             ? geometry.master
                             : geometry.anchors.at(static_cast<std::size_t>(f.source - 1));
    const TagState at_send = propagate(tag, f.tx_true - cycle_start);
    Seconds arrival = f.tx_true + tof(at_send.position, sender, geometry.c);
    if (f.source != kMasterId && !range_bias.empty()) {
      arrival += static_cast<Seconds>(range_bias[static_cast<std::size_t>(f.source - 1)]) / c;
    }
    arrivals.push_back(arrival);
    out.push_back({f.source, f.pair, f.tx_master_ts, read_measured(tag.clock, arrival, rng)});
  }
  std::sort(arrivals.begin(), arrivals.end());
  for (std::size_t k = 1; k < arrivals.size(); ++k) {
    if (arrivals[k] - arrivals[k - 1] < schedule.guard) {
      throw Error(ErrorCode::ScheduleOverlap, "two frames arrive within the guard time");
    }
  }
  return out;
}

std::vector<ReceivedFrame> simulate_cycle(const NetworkGeometry& geometry,
                                          const NetworkClocks& clocks, const TagState& tag,
                                          const BroadcastSchedule& schedule,
                                          std::span<const SyncState> syncs, Seconds cycle_start,
                                          RandomStream& rng) {
  const auto tx = broadcast_cycle(clocks, schedule, syncs, cycle_start, rng);
  return receive_cycle(geometry, schedule, tx, tag, cycle_start, rng);
}

Seconds protocol_interval(const ReceivedFrame& anchor_frame, const ReceivedFrame& master_frame,
                          Rate tag_rate) {
  return tag_rate * (anchor_frame.tx_master_ts - master_frame.tx_master_ts);
}

DtdoaMeasurement compute_dtdoa(const ReceivedFrame& anchor_frame,
                               const ReceivedFrame& master_frame, Seconds g, double c) {
  DtdoaMeasurement m;
  m.anchor = static_cast<std::size_t>(std::max(anchor_frame.source - 1, 0));
  const Seconds diff = (anchor_frame.rx_tag_ts - master_frame.rx_tag_ts) - g;
  m.value = static_cast<double>(static_cast<Seconds>(c) * diff);
  return m;
}

double ideal_tdoa(const TagState& tag, Point anchor, const NetworkGeometry& geometry) {
  return tag.clock.rate() *
         (distance(tag.position, anchor) - distance(tag.position, geometry.master));
}

const ReceivedFrame& find_frame(std::span<const ReceivedFrame> frames, int source,
                                PairIndex pair) {
  for (const ReceivedFrame& f : frames) {
    if (f.source == source && f.pair == pair) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "frame missing for source " + std::to_string(source));
}

Rate tag_rate_from_pair(std::span<const ReceivedFrame> frames, int source) {
  const ReceivedFrame& a = find_frame(frames, source, PairIndex::First);
  const ReceivedFrame& b = find_frame(frames, source, PairIndex::Second);
  return estimate_tag_rate(a.rx_tag_ts, b.rx_tag_ts, a.tx_master_ts, b.tx_master_ts);
}

std::vector<DtdoaMeasurement> measure_cycle(std::span<const ReceivedFrame> frames,
                                            std::size_t anchors, double c,
                                            TagRateSource rate_source, PairIndex pair) {
  std::vector<DtdoaMeasurement> out;
  out.reserve(anchors);
  const ReceivedFrame& master = find_frame(frames, kMasterId, pair);
  const Rate master_rate =
      rate_source == TagRateSource::MasterPair ? tag_rate_from_pair(frames, kMasterId) : 0.0L;
  for (std::size_t i = 0; i < anchors; ++i) {
    const int source = static_cast<int>(i + 1);
    const ReceivedFrame& anchor = find_frame(frames, source, pair);
    const Rate rate =
        rate_source == TagRateSource::MasterPair ? master_rate : tag_rate_from_pair(frames, source);
    out.push_back(compute_dtdoa(anchor, master, protocol_interval(anchor, master, rate), c));
  }
  return out;
}

void annotate_truth(std::vector<DtdoaMeasurement>& measurements, const TagState& tag,
                    const NetworkGeometry& geometry, const NetworkClocks& clocks) {
  const double nu_m = clocks.master.rate();
  const double tag_ratio = tag.clock.rate() / nu_m;
  for (DtdoaMeasurement& m : measurements) {
    const double nu_i = clocks.anchors.at(m.anchor).rate();
    const Seconds e = conversion_residual(nu_i, static_cast<Rate>(nu_i) / nu_m,
                                          geometry.anchor_tof(m.anchor));
    m.ideal_term = ideal_tdoa(tag, geometry.anchors.at(m.anchor), geometry);
    m.bias_term = -geometry.c * tag_ratio * static_cast<double>(e);
  }
}

void write_frames_csv(std::ostream& out, std::span<const FrameLogRow> rows) {
  out << "cycle,source,pair,tx_master_ts_s,rx_tag_ts_s\n";
  for (const FrameLogRow& r : rows) {
    out << r.cycle << ',' << r.frame.source << ',' << (r.frame.pair == PairIndex::First ? 1 : 2)
        << ',' << format_sig(r.frame.tx_master_ts, 18) << ','
        << format_sig(r.frame.rx_tag_ts, 18) << '\n';
  }
}

}  // namespace uwb
