#include <doctest.h>

#include "uwb/error.hpp"
#include "uwb/geometry.hpp"
#include "uwb/random.hpp"

using namespace uwb;

TEST_CASE("geometry validation") {
  NetworkGeometry g{{0, 0}, {{10, 0}, {10, 10}, {0, 10}}};
  CHECK_NOTHROW(g.validate());
  CHECK_THROWS_AS(g.validate(4), Error);
  g.anchors.push_back({10, 0});
  CHECK_THROWS_AS(g.validate(), Error);
  g.anchors.back() = {0, 0};
  CHECK_THROWS_AS(g.validate(), Error);
  g.anchors.back() = {5, 5};
  g.c = 0;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("time of flight") {
  CHECK(tof({0, 0}, {299.792458, 0}, kSpeedOfLight) == doctest::Approx(1e-6).epsilon(1e-15));
  CHECK(tof({1, 1}, {1, 1}, kSpeedOfLight) == 0);
  const NetworkGeometry g{{0, 0}, {{3, 4}}};
  CHECK(static_cast<double>(g.anchor_tof(0)) == doctest::Approx(5.0 / kSpeedOfLight));
  CHECK(g.centroid() == Point{3, 4});
}

TEST_CASE("motion bound contains the propagated tof") {
  RandomStream rng(11);
  for (int k = 0; k < 200; ++k) {
    const TagState tag{{rng.uniform(0, 20), rng.uniform(0, 20)},
                       {rng.uniform(-2, 2), rng.uniform(-2, 2)}, {}};
    const Point anchor{rng.uniform(0, 20), rng.uniform(0, 20)};
    const Seconds dt = rng.uniform(0, 0.05);
    const TofBounds b = tof_motion_bound(tag, anchor, dt, kSpeedOfLight);
    const Seconds moved = tof(propagate(tag, dt).position, anchor, kSpeedOfLight);
    CHECK(moved >= b.lower - 1e-18L);
    CHECK(moved <= b.upper + 1e-18L);
  }
}

TEST_CASE("static tag has a zero-width bound") {
  const TagState tag{{1, 2}, {0, 0}, {}};
  const TofBounds b = tof_motion_bound(tag, {4, 6}, 0.5L, kSpeedOfLight);
  CHECK(b.lower == b.upper);
}
