#include <doctest.h>

#include <cmath>
#include <limits>

#include "uwb/error.hpp"
#include "uwb/random.hpp"
#include "uwb/sync.hpp"

using namespace uwb;

namespace {

struct Pair {
  ClockModel master, anchor;
  Seconds tof_im;
};

Pair random_pair(RandomStream& rng) {
  return {ClockModel(rng.uniform(-1e-3, 1e-3), 1 + 1e-6 * rng.uniform(-10, 10)),
          ClockModel(rng.uniform(-1e-3, 1e-3), 1 + 1e-6 * rng.uniform(-10, 10)),
          static_cast<Seconds>(rng.uniform(1, 30)) / kSpeedOfLight};
}

}  // namespace

TEST_CASE("noiseless sync recovers rate and offset") {
  RandomStream rng(5);
  for (int k = 0; k < 200; ++k) {
    const Pair p = random_pair(rng);
    const Seconds epoch = rng.uniform(0, 100);
    const Seconds gap = rng.uniform(1e-3, 10);
    const SyncObservation obs = observe_sync(p.master, p.anchor, p.tof_im, epoch, gap, rng);
    const Rate rate = estimate_rel_rate(obs);
    const Rate truth = static_cast<Rate>(p.anchor.rate()) / p.master.rate();
    CHECK(std::abs(rate / truth - 1) < 1e-12L);

    // offset constancy: both beacons give the same relative offset
    const Seconds o1 = estimate_rel_offset(obs, rate);
    const Seconds o2 = estimate_rel_offset_delayed(obs, rate);
    CHECK(std::abs(o1 - o2) < 1e-15L);

    // conversion error is the fixed residual (1 - nu_i)/nu_bar * tof
    const SyncState s = synchronize(obs);
    const Seconds t = epoch + rng.uniform(0, 20);
    const Seconds converted = to_master_timescale(read_ideal(p.anchor, t), s);
    const Seconds err = converted - read_ideal(p.master, t);
    const Seconds e = conversion_residual(p.anchor.rate(), truth, p.tof_im);
    CHECK(std::abs(err - e) <= 1e-12L * std::abs(read_ideal(p.master, t)));
    // independent oracle: offset truth o_i - nu_bar o_m, shifted by the residual term
    const Seconds o_true = p.anchor.offset() - truth * p.master.offset();
    // rounding of the stamps, amplified by epoch / gap through the rate
    const Seconds tol = 8 * std::numeric_limits<Seconds>::epsilon() * (epoch + 1) * (epoch / gap + 1);
    CHECK(std::abs(s.rel_offset - (o_true - (1 - static_cast<Seconds>(p.anchor.rate())) * p.tof_im)) < tol);
  }
}

TEST_CASE("averaged and single offset switch") {
  const SyncObservation obs{1.0L, 2.0L, 1.5L, 2.5000001L, 0};
  const SyncState avg = synchronize(obs, true);
  const SyncState single = synchronize(obs, false);
  CHECK(avg.rel_offset == average_rel_offset(estimate_rel_offset(obs, avg.rel_rate),
                                             estimate_rel_offset_delayed(obs, avg.rel_rate)));
  CHECK(single.rel_offset == estimate_rel_offset(obs, single.rel_rate));
}

TEST_CASE("zero intervals are rejected") {
  const SyncObservation obs{1.0L, 1.0L, 2.0L, 3.0L, 0};
  CHECK_THROWS_AS(estimate_rel_rate(obs), Error);
  try {
    estimate_tag_rate(1, 2, 5, 5);
    FAIL("expected ZeroInterval");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroInterval);
  }
}

TEST_CASE("tag rate examples") {
  // static tag, ideal clocks
  CHECK(estimate_tag_rate(0.5L, 0.5002L, 1.0L, 1.0002L) == doctest::Approx(1.0).epsilon(1e-15));
  // static tag, nu = 1 - 3e-6, nu_m = 1
  const ClockModel tag(1e-4L, 1 - 3e-6);
  const Seconds tx1 = 0.01L, tx2 = 0.0102L, flight = 20.0L / kSpeedOfLight;
  const Rate r = estimate_tag_rate(read_ideal(tag, tx1 + flight), read_ideal(tag, tx2 + flight), tx1, tx2);
  CHECK(std::abs(r - 0.999997L) < 1e-15L);
}

TEST_CASE("tag moving toward the anchor biases the rate by s/c") {
  const double speed = 1.5;
  const Seconds d = 200e-6L;
  const ClockModel tag(0, 1.0);
  const double rho0 = 12.0;
  const Seconds rx1 = read_ideal(tag, rho0 / kSpeedOfLight);
  const Seconds rx2 = read_ideal(tag, d + (rho0 - speed * static_cast<double>(d)) / kSpeedOfLight);
  const Rate r = estimate_tag_rate(rx1, rx2, 0, d);
  CHECK(std::abs((1 - r) - speed / kSpeedOfLight) < 1e-15L);
}

TEST_CASE("sync epochs") {
  const SyncConfig cfg{10, 4, true};
  CHECK(sync_epoch_at(0, cfg).index == 0);
  CHECK(sync_epoch_at(0, cfg).first_beacon == -4);
  CHECK(sync_epoch_at(9.999L, cfg).index == 0);
  CHECK(sync_epoch_at(10, cfg).index == 1);
  CHECK(sync_epoch_at(25, cfg).first_beacon == 16);
  CHECK_THROWS_AS(sync_epoch_at(0, SyncConfig{0, 1, true}), Error);
}
