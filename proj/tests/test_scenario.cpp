#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "uwb/error.hpp"
#include "uwb/scenario.hpp"

using namespace uwb;

namespace {

const std::string kScenarioDir = UWB_SCENARIO_DIR;

// Noise-free copy; ideal clocks unless keep_rates.
Scenario quiet(Scenario s, bool keep_rates = false) {
  const auto strip = [&](const ClockModel& c) {
    return keep_rates ? c.with_noise(NoiseSpec::none()) : ClockModel::ideal();
  };
  s.clocks.master = strip(s.clocks.master);
  for (ClockModel& a : s.clocks.anchors) a = strip(a);
  s.tag_clock = strip(s.tag_clock);
  return s;
}

double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  const double t = len2 > 0 ? std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + t * ab);
}

double path_distance(Point p, const WalkPath& w) {
  double best = INFINITY;
  for (std::size_t k = 1; k < w.waypoints.size(); ++k) {
    best = std::min(best, segment_distance(p, w.waypoints[k - 1], w.waypoints[k]));
  }
  return best;
}

}  // namespace

TEST_CASE("default room is a valid placeholder scenario") {
  const Scenario s = default_room(1);
  CHECK_NOTHROW(s.validate());
  CHECK(s.placeholder_layout);
  CHECK(s.geometry.anchors.size() == 6);
  CHECK(s.static_positions.size() == 2);
  REQUIRE(s.walk.has_value());
  CHECK(s.broadcast_schedule().cycle_period == doctest::Approx(15e-3));
  for (const ClockModel& c : s.clocks.anchors) CHECK(std::abs(c.rate() - 1) <= 3e-6);
  CHECK(to_json(default_room(1)) == to_json(s));
  CHECK(to_json(default_room(2)) != to_json(s));
}

TEST_CASE("bundled default room file matches the built-in scenario") {
  CHECK(to_json(load_scenario(kScenarioDir + "/default_room.json")) == to_json(default_room(1)));
  CHECK(to_json(load_scenario(kScenarioDir + "/default_room.json", 5)) == to_json(default_room(5)));
}

TEST_CASE("json round trip") {
  for (const char* name : {"default_room.json", "biased_room.json", "ideal_square.json"}) {
    CAPTURE(name);
    const Scenario s = load_scenario(kScenarioDir + "/" + name);
    const std::string once = to_json(s, 2);
    CHECK(to_json(parse_scenario(once)) == to_json(s));
  }
}

TEST_CASE("config errors carry their codes") {
  try {
    load_scenario(kScenarioDir + "/does_not_exist.json");
    FAIL("expected ConfigNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigNotFound);
  }
  for (const char* text : {"{", "[1,2]", R"({"geometry": {"master": [0, 0], "anchors": [[1, 0]]}})",
                           R"({"noise": {"distribution": "laplace"}})", R"({"tag_rate": "fast"})"}) {
    CAPTURE(text);
    try {
      parse_scenario(text);
      FAIL("expected ConfigParse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigParse);
    }
  }
}

TEST_CASE("noise-free ideal clocks recover static positions") {
  Scenario s = quiet(default_room(3));
  const StaticResult r = run_static(s, 20);
  for (const auto& p : r.positions) {
    CHECK(p.failures == 0);
    for (const Point& e : p.errors) CHECK(e.norm() < 1e-8);
  }
}

TEST_CASE("static noise stays well inside the room-scale bound") {
  const StaticResult r = run_static(default_room(1), 500);
  for (const auto& p : r.positions) {
    CHECK(p.failures == 0);
    CHECK(p.errors.size() == 500);
    double worst = 0;
    for (const Point& e : p.errors) worst = std::max(worst, e.norm());
    CHECK(worst < 0.2);
  }
}

TEST_CASE("range bias shifts the mean fix") {
  Scenario biased = load_scenario(kScenarioDir + "/biased_room.json");
  const StaticResult r = run_static(biased, 1000);
  bool shifted = false;
  for (const auto& p : r.positions) {
    double mx = 0, my = 0;
    for (const Point& e : p.errors) mx += e.x, my += e.y;
    const double n = static_cast<double>(p.errors.size());
    mx /= n;
    my /= n;
    double vx = 0, vy = 0;
    for (const Point& e : p.errors) vx += (e.x - mx) * (e.x - mx), vy += (e.y - my) * (e.y - my);
    const double se_x = std::sqrt(vx / (n - 1) / n), se_y = std::sqrt(vy / (n - 1) / n);
    shifted = shifted || std::abs(mx) > 3 * se_x || std::abs(my) > 3 * se_y;
  }
  CHECK(shifted);
}

TEST_CASE("same seed reproduces the static run") {
  const Scenario s = default_room(9);
  const auto a = static_errors_csv(run_static(s, 50), scenario_header(s, "test"));
  const auto b = static_errors_csv(run_static(s, 50), scenario_header(s, "test"));
  CHECK(a == b);
}

TEST_CASE("walk path kinematics") {
  const WalkPath w{{{0, 0}, {3, 0}, {3, 4}}, 2.0};
  CHECK(w.length() == doctest::Approx(7));
  auto [p, v] = w.state_at(1.0);
  CHECK(p == Point{2, 0});
  CHECK(v == Point{2, 0});
  std::tie(p, v) = w.state_at(2.5);
  CHECK(p.x == doctest::Approx(3));
  CHECK(p.y == doctest::Approx(2));
  std::tie(p, v) = w.state_at(100);
  CHECK(p == Point{3, 4});
  CHECK(v == Point{0, 0});
}

TEST_CASE("noise-free walk stays on the planned path") {
  Scenario s = quiet(default_room(1));
  s.duration = 10;
  const WalkResult r = run_walk(s);
  const BroadcastSchedule sched = s.broadcast_schedule();
  // positions sampled between the first and the last frame of a burst
  const double burst = static_cast<double>(sched.last_tx_offset() - sched.master_first_tx);
  REQUIRE(r.samples.size() > 100);
  CHECK(r.failures == 0);
  double worst_path = 0, worst_lag = 0;
  for (const WalkSample& w : r.samples) {
    REQUIRE(w.ok);
    worst_path = std::max(worst_path, path_distance(w.fix, *s.walk));
    worst_lag = std::max(worst_lag, distance(w.fix, w.truth));
  }
  // a fix blends positions from one burst, so it can leave the path by up to
  // the distance walked during that burst
  CHECK(worst_lag < s.walk->speed * burst);
  CHECK(worst_path < s.walk->speed * burst);
  CHECK(worst_path > 0);
}

TEST_CASE("a stationary walk behaves like the static run") {
  Scenario s = quiet(default_room(1));
  s.walk = WalkPath{{{4, 3}, {4, 3}}, 1.5};
  s.duration = 1;
  const WalkResult r = run_walk(s);
  REQUIRE_FALSE(r.samples.empty());
  for (const WalkSample& w : r.samples) {
    CHECK(w.ok);
    CHECK(distance(w.fix, {4, 3}) < 1e-8);
  }
}

TEST_CASE("noisy walk tracks the path") {
  Scenario s = default_room(1);
  s.duration = 5;
  const WalkResult r = run_walk(s);
  CHECK(r.failures == 0);
  for (const WalkSample& w : r.samples) CHECK(distance(w.fix, w.truth) < 0.2);
}

TEST_CASE("scalability rows do not depend on the tag count") {
  const Scenario s = default_room(1);
  const std::size_t counts[] = {1, 10, 100};
  const auto rows = run_scalability(s, counts, 2);
  REQUIRE(rows.size() == 3);
  for (const ScalabilityRow& r : rows) {
    CHECK(r.cycle_duration == rows[0].cycle_duration);
    CHECK(r.frames_per_cycle == rows[0].frames_per_cycle);
    CHECK(r.frames_per_cycle == 14);
    CHECK(r.fixes == 2 * r.tags);
    CHECK(r.fixes_per_second_per_tag == doctest::Approx(1 / 15e-3));
  }
  const std::size_t none[] = {0};
  CHECK_THROWS_AS(run_scalability(s, none), Error);
}

TEST_CASE("a scenario without anchors is a configuration error") {
  Scenario s = default_room(1);
  s.geometry.anchors.clear();
  s.clocks.anchors.clear();
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_THROWS_AS(run_static(s, 1), Error);
  try {
    parse_scenario(R"({"geometry": {"master": [0, 0], "anchors": []}})");
    FAIL("expected ConfigParse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigParse);
  }
}

TEST_CASE("predicted variance matches the empirical spread") {
  for (TagRateSource source : {TagRateSource::MasterPair, TagRateSource::PerAnchor}) {
    CAPTURE(static_cast<int>(source));
    Scenario s = default_room(4);
    s.tag_rate = source;
    const Seconds period = s.broadcast_schedule().cycle_period;
    // fresh sync per sample at a fixed lag, so every sample has the same budget
    s.sync.interval = 10 * period;
    s.sync.gap = 0.1L;
    ProtocolSimulator sim(s);
    const TagState tag{{3, 2.5}, {0, 0}, s.tag_clock};
    const std::size_t n = s.geometry.anchors.size();
    const int N = 4000;
    std::vector<double> sum(n, 0), sum2(n, 0);
    for (int j = 0; j < N; ++j) {
      const std::int64_t cycle = 10 * j + 3;
      const auto rx = sim.receive(sim.broadcast(cycle), tag, 0, cycle);
      for (const DtdoaMeasurement& m : sim.measure(rx, cycle)) {
        sum[m.anchor] += m.value;
        sum2[m.anchor] += m.value * m.value;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = sum[i] / N;
      const double var = (sum2[i] - N * mean * mean) / (N - 1);
      const double predicted = sim.predicted_variance(i, 3);
      CHECK(sim.predicted_variance(i, 10 * (N - 1) + 3) == doctest::Approx(predicted).epsilon(1e-9));
      CHECK(var == doctest::Approx(predicted).epsilon(0.10));
    }
  }
}
