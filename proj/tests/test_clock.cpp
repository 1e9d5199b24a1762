#include <doctest.h>

#include <cmath>
#include <vector>

#include "uwb/clock.hpp"
#include "uwb/error.hpp"
#include "uwb/random.hpp"

using namespace uwb;

TEST_CASE("ideal reading is the affine map") {
  const ClockModel c(2.5e-3L, 1.0 + 3e-6);
  CHECK(read_ideal(c, 0) == 2.5e-3L);
  const Seconds t = 7.25L;
  CHECK(read_ideal(c, t) == 2.5e-3L + static_cast<Seconds>(1.0 + 3e-6) * t);
}

TEST_CASE("clock validation") {
  CHECK_THROWS_AS(ClockModel(0, 0.0), Error);
  CHECK_THROWS_AS(ClockModel(0, -1.0), Error);
  CHECK_THROWS_AS(ClockModel(0, 1.01), Error);  // outside the default 1e-3 guard
  CHECK_NOTHROW(ClockModel(0, 1.01, {}, 0.1));
  CHECK_THROWS_AS(ClockModel(std::nanl(""), 1.0), Error);
  CHECK_THROWS_AS(NoiseSpec::gaussian(-1).validate(), Error);
  NoiseSpec bad = NoiseSpec::uniform(1e-12);
  bad.tick = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("noiseless reading equals the ideal one") {
  RandomStream rng(1);
  const ClockModel c(1e-3L, 1.0 - 2e-6);
  for (Seconds t : {0.0L, 1e-3L, 12.5L}) CHECK(read_measured(c, t, rng) == read_ideal(c, t));
}

TEST_CASE("noise statistics match the declared sigma") {
  const double a = 15.65e-12;
  for (const NoiseSpec& n : {NoiseSpec::uniform(a), NoiseSpec::gaussian(a)}) {
    RandomStream rng(99);
    const ClockModel c(0, 1.0, n);
    const int N = 200000;
    long double s = 0, ss = 0;
    double lo = 0, hi = 0;
    for (int k = 0; k < N; ++k) {
      const double e = static_cast<double>(read_measured(c, 1.0L, rng) - 1.0L);
      s += e;
      ss += static_cast<long double>(e) * e;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    const double mean = static_cast<double>(s / N);
    const double sd = std::sqrt(static_cast<double>(ss / N) - mean * mean);
    CHECK(std::abs(mean) < 4 * n.sigma() / std::sqrt(N));
    CHECK(sd == doctest::Approx(n.sigma()).epsilon(0.01));
    if (n.distribution == NoiseDistribution::Uniform) {
      CHECK(n.sigma() == doctest::Approx(a / std::sqrt(3.0)));
      CHECK(lo >= -a * (1 + 1e-6));
      CHECK(hi <= a * (1 + 1e-6));
    }
  }
}

TEST_CASE("quantization rounds to the tick after noise") {
  CHECK(quantize(10.4L, 1.0) == 10.0L);
  CHECK(quantize(10.6L, 1.0) == 11.0L);
  CHECK(quantize(-0.6L, 0.5) == -0.5L);
  NoiseSpec n = NoiseSpec::uniform(1e-12);
  n.tick = 15.65e-12;
  RandomStream rng(3);
  const ClockModel c(0, 1.0, n);
  for (int k = 0; k < 100; ++k) {
    const Seconds r = read_measured(c, 1e-3L, rng);
    const Seconds q = r / static_cast<Seconds>(*n.tick);
    CHECK(std::abs(q - std::nearbyint(q)) < 1e-6L);
  }
}

TEST_CASE("substreams are addressed, not sequenced") {
  RandomStream a = RandomStream::derive(42, {4, 3, 1000});
  RandomStream b = RandomStream::derive(42, {4, 3, 1000});
  RandomStream other = RandomStream::derive(42, {4, 3, 1001});
  const auto x = a();
  CHECK(x == b());
  CHECK(x != other());
  CHECK(RandomStream::derive(42, {1, 2})() != RandomStream::derive(42, {2, 1})());
  CHECK(RandomStream::derive(1, {5})() != RandomStream::derive(2, {5})());
}
