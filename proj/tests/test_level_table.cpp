#include "doctest.h"
#include "xset/level_table.hpp"

using namespace xset;

TEST_CASE("level table: k=2 defaults") {
  LevelTable t(2, 0.0, false);
  CHECK(t.capacity(0) == 1);
  CHECK(t.capacity(1) == 84);
  CHECK(t.capacity(2) == 7056);
  CHECK(t.capacity(3) == 49787136);
  CHECK(t.latency(1) == 1);
  CHECK(t.latency(2) == 84);
  CHECK(t.height_for(1000000) == 3);
  CHECK(t.height_for(84) == 1);
  CHECK(t.height_for(85) == 2);
}

TEST_CASE("level table: ratios and finger mode") {
  for (unsigned k : {2u, 3u, 4u, 6u})
    for (bool finger : {false, true}) {
      LevelTable t(k, 0.0, finger);
      CHECK(t.capacity(1) >= 84);
      for (unsigned i = 1; i + 1 < t.levels(); ++i) {
        CHECK(t.capacity(i + 1) >= 18 * t.capacity(i));
        CHECK(t.capacity(i) % 84 == 0);
        if (finger && t.capacity(i) < (1ull << 31)) CHECK(t.capacity(i + 1) < t.capacity(i) * t.capacity(i));
      }
    }
  LevelTable f(2, 0.0, true);
  CHECK(f.capacity(2) == 6972);
  CHECK(f.capacity(3) == 48608700);
}

TEST_CASE("level table: k below 2 is a configuration error") { CHECK_THROWS_AS(LevelTable(1, 0.0, false), ConfigError); }
