#include <random>

#include "doctest.h"
#include "xset/counters.hpp"

using namespace xset;

TEST_CASE("counter queue: max tracking and subtraction") {
  CounterQueue cq;
  for (int i = 0; i < 5; ++i) cq.add(i);
  cq.increment(3);
  cq.increment(3);
  cq.increment(1);
  CHECK(cq.max_id() == 3);
  CHECK(cq.max_value() == 2);
  CHECK(cq.pick_and_subtract(5) == 3);
  CHECK(cq.value(3) == 0);
  CHECK(cq.max_id() == 1);
  CHECK(cq.check());
  cq.remove(1);
  CHECK(cq.max_value() == 0);
  CHECK(cq.check());
}

TEST_CASE("counter queue: randomized consistency") {
  CounterQueue cq;
  std::vector<std::uint64_t> ref(50, 0);
  for (int i = 0; i < 50; ++i) cq.add(i);
  std::mt19937_64 rng(2);
  for (int r = 0; r < 20000; ++r) {
    if (rng() % 5 == 0) {
      std::uint64_t mx = *std::max_element(ref.begin(), ref.end());
      int id = cq.pick_and_subtract(3);
      CHECK(ref[id] == mx);
      ref[id] = ref[id] > 3 ? ref[id] - 3 : 0;
    } else {
      int id = static_cast<int>(rng() % 50);
      cq.increment(id);
      ++ref[id];
    }
  }
  for (int i = 0; i < 50; ++i) CHECK(cq.value(i) == ref[i]);
  CHECK(cq.check());
}

TEST_CASE("counter game: bound 2q(floor(log2 p)+1)") {
  for (std::uint64_t p : {1, 4, 64, 1024})
    for (std::uint64_t q : {2, 3, 8})
      for (auto a : {CounterAdversary::round_robin, CounterAdversary::single_target, CounterAdversary::random}) {
        auto st = counter_game(p, q, a, 10000, 99);
        CHECK(st.max_counter <= st.bound);
      }
  CHECK(counter_game(1, 3, CounterAdversary::random, 1000, 1).max_counter <= 6);
  CHECK(counter_game(4, 3, CounterAdversary::round_robin, 10000, 1).bound == 18);
}
