#include "uwb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uwb/error.hpp"
#include "uwb/random.hpp"

namespace uwb {

using nlohmann::json;

// ---- paths -----------------------------------------------------------------

double WalkPath::length() const {
  double total = 0;
  for (std::size_t k = 1; k < waypoints.size(); ++k) total += distance(waypoints[k - 1], waypoints[k]);
  return total;
}

std::pair<Point, Point> WalkPath::state_at(double t) const {
  if (waypoints.empty()) return {{}, {}};
  double left = std::max(0.0, t) * speed;
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    const Point from = waypoints[k - 1];
    const Point to = waypoints[k];
    const double seg = distance(from, to);
    if (seg == 0.0) continue;
    const Point dir = (1.0 / seg) * (to - from);
    if (left < seg) return {from + left * dir, speed * dir};
    left -= seg;
  }
  return {waypoints.back(), {}};
}

// ---- scenario --------------------------------------------------------------

void Scenario::validate() const {
  geometry.validate(2);
  if (clocks.anchors.size() != geometry.anchors.size()) {
    throw Error(ErrorCode::InvalidArgument, "clock count differs from anchor count");
  }
  if (!range_bias.empty() && range_bias.size() != geometry.anchors.size()) {
    throw Error(ErrorCode::InvalidArgument, "range_bias needs one entry per anchor");
  }
  if (!(duration > 0)) throw Error(ErrorCode::InvalidArgument, "duration must be > 0");
  for (const Point& p : static_positions) {
    if (!p.finite()) throw Error(ErrorCode::InvalidArgument, "static position not finite");
  }
  if (walk) {
    if (walk->waypoints.empty()) throw Error(ErrorCode::InvalidArgument, "walk needs waypoints");
    for (const Point& p : walk->waypoints) {
      if (!p.finite()) throw Error(ErrorCode::InvalidArgument, "waypoint not finite");
    }
    if (!(walk->speed >= 0)) throw Error(ErrorCode::InvalidArgument, "walk speed must be >= 0");
  }
  if (!(sync.interval > 0) || !(sync.gap > 0)) {
    throw Error(ErrorCode::ZeroInterval, "sync interval and gap must be > 0");
  }
}

BroadcastSchedule Scenario::broadcast_schedule() const {
  return BroadcastSchedule::make_default(geometry.anchors.size(), schedule);
}

Scenario default_room(std::uint64_t seed) {
  Scenario s;
  s.name = "default-room";
  s.seed = seed;
  s.placeholder_layout = true;
  s.geometry.master = {0.0, 4.0};
  s.geometry.anchors = {{0.0, 0.0}, {5.0, 0.0}, {10.0, 0.0}, {10.0, 8.0}, {5.0, 8.0}, {0.0, 8.0}};
  const NoiseSpec noise = NoiseSpec::uniform(kTickSeconds);
  RandomStream rng = RandomStream::derive(seed, {static_cast<std::uint64_t>(Stream::Clocks)});
  auto draw = [&] {
    const double offset = rng.uniform(-1e-3, 1e-3);
    const double rate = 1.0 + 1e-6 * rng.uniform(-3.0, 3.0);
    return ClockModel(offset, rate, noise);
  };
  s.clocks.master = draw();
  for (std::size_t i = 0; i < s.geometry.anchors.size(); ++i) s.clocks.anchors.push_back(draw());
  s.tag_clock = draw();
  s.static_positions = {{3.0, 2.5}, {7.0, 5.5}};
  s.walk = WalkPath{{{2.0, 2.0}, {8.0, 2.0}, {8.0, 6.0}, {2.0, 6.0}, {2.0, 2.0}}, 1.5};
  s.duration = 60.0;
  return s;
}

namespace {

Point point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ConfigParse, "point must be [x, y]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json point_json(Point p) { return json::array({p.x, p.y}); }

NoiseSpec noise_from(const json& j) {
  NoiseSpec n;
  const std::string d = j.value("distribution", std::string("none"));
  if (d == "none") n.distribution = NoiseDistribution::None;
  else if (d == "gaussian") n.distribution = NoiseDistribution::Gaussian;
  else if (d == "uniform") n.distribution = NoiseDistribution::Uniform;
  else throw Error(ErrorCode::ConfigParse, "unknown noise distribution '" + d + "'");
  n.scale = j.value("scale_s", 0.0);
  if (j.contains("tick_s") && !j.at("tick_s").is_null()) n.tick = j.at("tick_s").get<double>();
  try {
    n.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigParse, e.what());
  }
  return n;
}

json noise_json(const NoiseSpec& n) {
  const char* d = n.distribution == NoiseDistribution::Gaussian  ? "gaussian"
                  : n.distribution == NoiseDistribution::Uniform ? "uniform"
                                                                 : "none";
  json j = {{"distribution", d}, {"scale_s", n.scale}};
  j["tick_s"] = n.tick ? json(*n.tick) : json(nullptr);
  return j;
}

ClockModel clock_from(const json& j, const NoiseSpec& fallback) {
  const double offset = j.value("offset_s", 0.0);
  double rate = 1.0;
  if (j.contains("rate")) rate = j.at("rate").get<double>();
  else if (j.contains("rate_ppm")) rate = 1.0 + 1e-6 * j.at("rate_ppm").get<double>();
  const NoiseSpec noise = j.contains("noise") ? noise_from(j.at("noise")) : fallback;
  try {
    return ClockModel(offset, rate, noise);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigParse, e.what());
  }
}

json clock_json(const ClockModel& c) {
  return {{"offset_s", static_cast<double>(c.offset())}, {"rate", c.rate()}, {"noise", noise_json(c.noise())}};
}

Scenario from_json(const json& j, std::optional<std::uint64_t> seed) {
  Scenario s;
  s.name = j.value("name", std::string("scenario"));
  s.seed = seed.value_or(j.value("seed", std::uint64_t{1}));
  s.placeholder_layout = j.value("placeholder_layout", false);

  const json& g = j.at("geometry");
  s.geometry.master = point_from(g.at("master"));
  for (const json& a : g.at("anchors")) s.geometry.anchors.push_back(point_from(a));
  s.geometry.c = j.value("c", kSpeedOfLight);

  const NoiseSpec noise = j.contains("noise") ? noise_from(j.at("noise")) : NoiseSpec::none();
  const json clocks = j.value("clocks", json::object());
  const std::size_t n = s.geometry.anchors.size();
  if (clocks.contains("random")) {
    const json& r = clocks.at("random");
    const double ppm = r.value("rate_ppm_max", 3.0);
    const double offset = r.value("offset_max_s", 1e-3);
    RandomStream rng = RandomStream::derive(s.seed, {static_cast<std::uint64_t>(Stream::Clocks)});
    auto draw = [&] {
      const double o = rng.uniform(-offset, offset);
      const double nu = 1.0 + 1e-6 * rng.uniform(-ppm, ppm);
      return ClockModel(o, nu, noise);
    };
    s.clocks.master = draw();
    for (std::size_t i = 0; i < n; ++i) s.clocks.anchors.push_back(draw());
    s.tag_clock = draw();
  } else {
    s.clocks.master = clock_from(clocks.value("master", json::object()), noise);
    const json anchors = clocks.value("anchors", json::array());
    if (!anchors.empty() && anchors.size() != n) {
      throw Error(ErrorCode::ConfigParse, "clocks.anchors needs one entry per anchor");
    }
    for (std::size_t i = 0; i < n; ++i) {
      s.clocks.anchors.push_back(clock_from(anchors.empty() ? json::object() : anchors.at(i), noise));
    }
    s.tag_clock = clock_from(clocks.value("tag", json::object()), noise);
  }

  if (j.contains("schedule")) {
    const json& sc = j.at("schedule");
    s.schedule.slot_spacing = sc.value("slot_spacing_s", static_cast<double>(s.schedule.slot_spacing));
    s.schedule.pair_gap = sc.value("pair_gap_s", static_cast<double>(s.schedule.pair_gap));
    s.schedule.guard = sc.value("guard_s", static_cast<double>(s.schedule.guard));
    s.schedule.min_cycle = sc.value("min_cycle_s", static_cast<double>(s.schedule.min_cycle));
  }
  if (j.contains("sync")) {
    const json& sy = j.at("sync");
    s.sync.interval = sy.value("interval_s", static_cast<double>(s.sync.interval));
    s.sync.gap = sy.value("gap_s", static_cast<double>(s.sync.gap));
    s.sync.use_averaged_offset = sy.value("averaged_offset", true);
  }
  const std::string rate = j.value("tag_rate", std::string("master-pair"));
  if (rate == "master-pair") s.tag_rate = TagRateSource::MasterPair;
  else if (rate == "per-anchor") s.tag_rate = TagRateSource::PerAnchor;
  else throw Error(ErrorCode::ConfigParse, "tag_rate must be master-pair or per-anchor");
  s.weighted = j.value("weighted", true);
  if (j.contains("solver")) {
    const json& so = j.at("solver");
    s.solver.multi_start = so.value("multi_start", false);
    s.solver.max_iterations = so.value("max_iterations", s.solver.max_iterations);
  }

  for (const json& p : j.value("static_positions", json::array())) s.static_positions.push_back(point_from(p));
  if (j.contains("walk") && !j.at("walk").is_null()) {
    WalkPath w;
    for (const json& p : j.at("walk").at("waypoints")) w.waypoints.push_back(point_from(p));
    w.speed = j.at("walk").value("speed_mps", 1.0);
    s.walk = w;
  }
  s.duration = j.value("duration_s", s.duration);
  s.repetitions = j.value("repetitions", s.repetitions);
  s.range_bias = j.value("range_bias_m", std::vector<double>{});
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view origin,
                        std::optional<std::uint64_t> seed) {
  Scenario s;
  try {
    s = from_json(json::parse(text), seed);
    s.validate();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigParse, std::string(origin) + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigParse) throw;
    throw Error(ErrorCode::ConfigParse, std::string(origin) + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigNotFound, "cannot open scenario '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string(), seed);
}

std::string to_json(const Scenario& s, int indent) {
  json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["placeholder_layout"] = s.placeholder_layout;
  j["c"] = s.geometry.c;
  j["geometry"]["master"] = point_json(s.geometry.master);
  j["geometry"]["anchors"] = json::array();
  for (const Point& a : s.geometry.anchors) j["geometry"]["anchors"].push_back(point_json(a));
  j["clocks"]["master"] = clock_json(s.clocks.master);
  j["clocks"]["anchors"] = json::array();
  for (const ClockModel& c : s.clocks.anchors) j["clocks"]["anchors"].push_back(clock_json(c));
  j["clocks"]["tag"] = clock_json(s.tag_clock);
  j["schedule"] = {{"slot_spacing_s", static_cast<double>(s.schedule.slot_spacing)},
                   {"pair_gap_s", static_cast<double>(s.schedule.pair_gap)},
                   {"guard_s", static_cast<double>(s.schedule.guard)},
                   {"min_cycle_s", static_cast<double>(s.schedule.min_cycle)}};
  j["sync"] = {{"interval_s", static_cast<double>(s.sync.interval)},
               {"gap_s", static_cast<double>(s.sync.gap)},
               {"averaged_offset", s.sync.use_averaged_offset}};
  j["tag_rate"] = s.tag_rate == TagRateSource::MasterPair ? "master-pair" : "per-anchor";
  j["weighted"] = s.weighted;
  j["solver"] = {{"multi_start", s.solver.multi_start}, {"max_iterations", s.solver.max_iterations}};
  j["static_positions"] = json::array();
  for (const Point& p : s.static_positions) j["static_positions"].push_back(point_json(p));
  if (s.walk) {
    j["walk"]["waypoints"] = json::array();
    for (const Point& p : s.walk->waypoints) j["walk"]["waypoints"].push_back(point_json(p));
    j["walk"]["speed_mps"] = s.walk->speed;
  } else {
    j["walk"] = nullptr;
  }
  j["duration_s"] = s.duration;
  j["repetitions"] = s.repetitions;
  j["range_bias_m"] = s.range_bias;
  return j.dump(indent);
}

// ---- simulator -------------------------------------------------------------

ProtocolSimulator::ProtocolSimulator(const Scenario& scenario)
    : scenario_(scenario), schedule_(scenario.broadcast_schedule()) {
  scenario_.validate();
}

SyncObservation ProtocolSimulator::observe(std::size_t i, const SyncEpoch& epoch) const {
  RandomStream rng = RandomStream::derive(
      scenario_.seed,
      {static_cast<std::uint64_t>(Stream::Sync), static_cast<std::uint64_t>(epoch.index), i});
  return observe_sync(scenario_.clocks.master, scenario_.clocks.anchors.at(i),
                      scenario_.geometry.anchor_tof(i), epoch.first_beacon, scenario_.sync.gap, rng);
}

std::span<const SyncState> ProtocolSimulator::syncs_at(Seconds t) {
  const SyncEpoch epoch = sync_epoch_at(t, scenario_.sync);
  if (sync_index_ != epoch.index) {
    const std::size_t n = scenario_.geometry.anchors.size();
    syncs_.assign(n, SyncState{});
    for (std::size_t i = 0; i < n; ++i) {
      syncs_[i] = synchronize(observe(i, epoch), scenario_.sync.use_averaged_offset);
      syncs_[i].residual = conversion_residual(scenario_.clocks.anchors[i].rate(), syncs_[i].rel_rate,
                                               scenario_.geometry.anchor_tof(i));
    }
    sync_index_ = epoch.index;
  }
  return syncs_;
}

std::vector<TransmittedFrame> ProtocolSimulator::broadcast(std::int64_t cycle) {
  const Seconds start = schedule_.cycle_start(cycle);
  RandomStream rng = RandomStream::derive(
      scenario_.seed, {static_cast<std::uint64_t>(Stream::Broadcast), static_cast<std::uint64_t>(cycle)});
  return broadcast_cycle(scenario_.clocks, schedule_, syncs_at(start), start, rng);
}

std::vector<ReceivedFrame> ProtocolSimulator::receive(std::span<const TransmittedFrame> frames,
                                                      const TagState& tag, std::uint64_t tag_id,
                                                      std::int64_t cycle) {
  RandomStream rng = RandomStream::derive(
      scenario_.seed,
      {static_cast<std::uint64_t>(Stream::TagReceive), tag_id, static_cast<std::uint64_t>(cycle)});
  return receive_cycle(scenario_.geometry, schedule_, frames, tag, schedule_.cycle_start(cycle), rng,
                       scenario_.range_bias);
}

NoiseBudget ProtocolSimulator::budget(std::size_t i, std::int64_t cycle) const {
  const Scenario& s = scenario_;
  const Seconds start = schedule_.cycle_start(cycle);
  NoiseBudget b;
  b.sigma_ts_m = s.clocks.master.noise().sigma();
  b.sigma_ts_i = s.clocks.anchors.at(i).noise().sigma();
  b.sigma_ts = s.tag_clock.noise().sigma();
  b.master_offset = static_cast<double>(s.clocks.master.offset());
  b.master_rate = s.clocks.master.rate();
  b.anchor_rate = s.clocks.anchors[i].rate();
  b.tag_rate = s.tag_clock.rate();
  b.sync_epoch = static_cast<double>(sync_epoch_at(start, s.sync).first_beacon);
  b.sync_gap = static_cast<double>(s.sync.gap);
  b.slot_offset = static_cast<double>(schedule_.slot_offsets[i]);
  b.anchor_pair_gap = static_cast<double>(schedule_.pair_gaps[i]);
  b.master_pair_gap = static_cast<double>(schedule_.master_pair_gap);
  b.master_tx_time = static_cast<double>(start + schedule_.master_first_tx);
  b.tof_im = static_cast<double>(s.geometry.anchor_tof(i));
  b.c = s.geometry.c;
  b.sigma2_master_term = b.sigma_ts_m * b.sigma_ts_m;
  return b;
}

double ProtocolSimulator::predicted_variance(std::size_t i, std::int64_t cycle) const {
  const NoiseBudget b = budget(i, cycle);
  const double t_m = b.master_tx_time;
  const double t_i = b.anchor_tx_time();
  return scenario_.tag_rate == TagRateSource::MasterPair ? var_lambda_master_rate(b, t_i, t_m)
                                                 : var_lambda(b, t_i, t_m);
}

std::vector<DtdoaMeasurement> ProtocolSimulator::measure(std::span<const ReceivedFrame> frames,
                                                         std::int64_t cycle) {
  auto meas = measure_cycle(frames, scenario_.geometry.anchors.size(), scenario_.geometry.c,
                            scenario_.tag_rate);
  if (scenario_.weighted) {
    for (DtdoaMeasurement& m : meas) m.predicted_variance = predicted_variance(m.anchor, cycle);
  }
  return meas;
}

PositionFix ProtocolSimulator::locate(const TagState& tag, std::uint64_t tag_id, std::int64_t cycle) {
  const auto tx = broadcast(cycle);
  const auto rx = receive(tx, tag, tag_id, cycle);
  const auto meas = measure(rx, cycle);
  return solve(meas, scenario_.geometry, std::nullopt, scenario_.solver);
}

// ---- runs ------------------------------------------------------------------

StaticResult run_static(const Scenario& scenario, std::size_t repetitions) {
  ProtocolSimulator sim(scenario);
  StaticResult out;
  std::int64_t cycle = 0;
  for (const Point& p : scenario.static_positions) {
    StaticPositionResult r;
    r.truth = p;
    r.errors.reserve(repetitions);
    const TagState tag{p, {}, scenario.tag_clock};
    for (std::size_t k = 0; k < repetitions; ++k, ++cycle) {
      try {
        const PositionFix fix = sim.locate(tag, 0, cycle);
        r.errors.push_back(fix.position - p);
      } catch (const Error&) {
        ++r.failures;
      }
    }
    out.positions.push_back(std::move(r));
  }
  return out;
}

WalkResult run_walk(const Scenario& scenario) {
  if (!scenario.walk) throw Error(ErrorCode::InvalidArgument, "scenario has no walk path");
  ProtocolSimulator sim(scenario);
  const WalkPath& path = *scenario.walk;
  double span = scenario.duration;
  if (path.speed > 0) span = std::min(span, path.length() / path.speed);
  const double period = static_cast<double>(sim.schedule().cycle_period);
  const auto cycles = static_cast<std::int64_t>(std::floor(span / period)) + 1;

  WalkResult out;
  out.samples.reserve(static_cast<std::size_t>(cycles));
  for (std::int64_t k = 0; k < cycles; ++k) {
    const double t = static_cast<double>(sim.schedule().cycle_start(k));
    const auto [pos, vel] = path.state_at(t);
    WalkSample s;
    s.cycle = k;
    s.time = t;
    s.truth = pos;
    try {
      s.fix = sim.locate(TagState{pos, vel, scenario.tag_clock}, 0, k).position;
      s.ok = true;
    } catch (const Error&) {
      ++out.failures;
    }
    out.samples.push_back(s);
  }
  return out;
}

std::vector<ScalabilityRow> run_scalability(const Scenario& scenario,
                                            std::span<const std::size_t> tag_counts,
                                            std::size_t cycles) {
  if (tag_counts.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one tag count");
  if (cycles == 0) throw Error(ErrorCode::InvalidArgument, "need at least one cycle");
  for (std::size_t n : tag_counts) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "tag counts must be >= 1");
  }
  double x_lo = scenario.geometry.master.x, x_hi = x_lo;
  double y_lo = scenario.geometry.master.y, y_hi = y_lo;
  for (const Point& a : scenario.geometry.anchors) {
    x_lo = std::min(x_lo, a.x);
    x_hi = std::max(x_hi, a.x);
    y_lo = std::min(y_lo, a.y);
    y_hi = std::max(y_hi, a.y);
  }
  const double mx = 0.1 * (x_hi - x_lo);
  const double my = 0.1 * (y_hi - y_lo);

  std::vector<ScalabilityRow> rows;
  for (std::size_t count : tag_counts) {
    ProtocolSimulator sim(scenario);
    ScalabilityRow row;
    row.tags = count;
    row.cycle_duration = static_cast<double>(sim.schedule().cycle_period);
    row.frames_per_cycle = sim.schedule().frames_per_cycle();
    for (std::size_t k = 0; k < cycles; ++k) {
      const auto cycle = static_cast<std::int64_t>(k);
      const auto tx = sim.broadcast(cycle);
      for (std::size_t tag = 0; tag < count; ++tag) {
        RandomStream place = RandomStream::derive(
            scenario.seed, {static_cast<std::uint64_t>(Stream::Layout), 1000, tag});
        const Point p{place.uniform(x_lo + mx, x_hi - mx), place.uniform(y_lo + my, y_hi - my)};
        try {
          const auto rx = sim.receive(tx, TagState{p, {}, scenario.tag_clock}, tag, cycle);
          solve(sim.measure(rx, cycle), scenario.geometry, std::nullopt, scenario.solver);
          ++row.fixes;
        } catch (const Error&) {
          // counted by omission
        }
      }
    }
    row.fixes_per_second_per_tag =
        count == 0 ? 0.0
                   : static_cast<double>(row.fixes) /
                         (static_cast<double>(count * cycles) * row.cycle_duration);
    rows.push_back(row);
  }
  return rows;
}

// ---- outputs ---------------------------------------------------------------

OutputHeader scenario_header(const Scenario& s, std::string command) {
  OutputHeader h;
  h.command = std::move(command);
  h.seed = s.seed;
  h.has_seed = true;
  h.set("scenario", s.name);
  if (s.placeholder_layout) h.set("layout", "placeholder, not surveyed coordinates");
  h.set("config", to_json(s));
  return h;
}

std::string static_errors_csv(const StaticResult& r, const OutputHeader& header) {
  std::ostringstream out;
  header.write(out);
  out << "position,rep,err_x_m,err_y_m\n";
  for (std::size_t p = 0; p < r.positions.size(); ++p) {
    const auto& errors = r.positions[p].errors;
    for (std::size_t k = 0; k < errors.size(); ++k) {
      out << (p + 1) << ',' << k << ',' << format_sig(errors[k].x) << ',' << format_sig(errors[k].y)
          << '\n';
    }
  }
  return out.str();
}

Figure static_histograms(const StaticResult& r, const OutputHeader& header, std::size_t bins) {
  std::ostringstream out;
  header.write(out);
  out << "position,axis,bin_lo_m,bin_hi_m,count\n";
  std::vector<svg::HistogramPanel> panels;
  for (std::size_t p = 0; p < r.positions.size(); ++p) {
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<double> v;
      v.reserve(r.positions[p].errors.size());
      for (const Point& e : r.positions[p].errors) v.push_back(axis == 0 ? e.x : e.y);
      const Histogram h = make_histogram(v, bins);
      const char* name = axis == 0 ? "x" : "y";
      for (std::size_t k = 0; k < h.counts.size(); ++k) {
        out << (p + 1) << ',' << name << ',' << format_sig(h.edges[k]) << ','
            << format_sig(h.edges[k + 1]) << ',' << h.counts[k] << '\n';
      }
      panels.push_back({"position " + std::to_string(p + 1) + ", " + name + " error", h, 0.0, v.size()});
    }
  }
  Figure fig;
  fig.csv = out.str();
  fig.svg = svg::histograms("Static tag position error", panels);
  return fig;
}

Figure walk_track(const WalkResult& r, const Scenario& s, const OutputHeader& header) {
  std::ostringstream out;
  header.write(out);
  out << "cycle,time_s,true_x_m,true_y_m,fix_x_m,fix_y_m,ok\n";
  std::vector<Point> fixes;
  for (const WalkSample& w : r.samples) {
    out << w.cycle << ',' << format_sig(w.time) << ',' << format_sig(w.truth.x) << ','
        << format_sig(w.truth.y) << ',';
    if (w.ok) {
      out << format_sig(w.fix.x) << ',' << format_sig(w.fix.y) << ",1\n";
      fixes.push_back(w.fix);
    } else {
      out << "nan,nan,0\n";
    }
  }
  std::vector<Point> nodes = s.geometry.anchors;
  nodes.insert(nodes.begin(), s.geometry.master);
  const std::vector<Point> planned = s.walk ? s.walk->waypoints : std::vector<Point>{};
  Figure fig;
  fig.csv = out.str();
  fig.svg = svg::track("Walking test: planned path and fixes", planned, fixes, nodes);
  return fig;
}

std::string scalability_csv(std::span<const ScalabilityRow> rows, const OutputHeader& header) {
  std::ostringstream out;
  header.write(out);
  out << "tags,cycle_duration_s,frames_per_cycle,fixes,fixes_per_second_per_tag\n";
  for (const ScalabilityRow& r : rows) {
    out << r.tags << ',' << format_sig(r.cycle_duration) << ',' << r.frames_per_cycle << ','
        << r.fixes << ',' << format_sig(r.fixes_per_second_per_tag) << '\n';
  }
  return out.str();
}

}  // namespace uwb
