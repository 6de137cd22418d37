#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "xset/ordered_set.hpp"

using namespace xset;

namespace {

Config finger_cfg() {
  Config c;
  c.finger_mode = true;
  return c;
}

void require_clean(const OrderedSet& s) {
  auto rep = s.audit();
  for (auto& v : rep.violations) MESSAGE(v);
  REQUIRE(rep.ok());
}

// random finger updates against a counted-key oracle; returns the worst touch count
std::uint64_t finger_fuzz(std::uint64_t seed, int ops, Key universe, int insert_bias, int audit_every) {
  OrderedSet s(finger_cfg());
  std::map<Key, int> o;
  std::size_t n = 0;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < ops; ++i) {
    const Key k = rng() % universe;
    if (static_cast<int>(rng() % 100) < insert_bias) {
      auto f = s.search(k);
      s.finger_insert(f, k);
      ++o[k];
      ++n;
    } else if (!o.empty()) {
      auto it = o.lower_bound(k);
      if (it == o.end()) it = o.begin();
      auto h = s.lookup(it->first);
      REQUIRE(h.has_value());
      s.finger_delete(*h);
      if (--it->second == 0) o.erase(it);
      --n;
    }
    REQUIRE(s.size() == n);
    if (audit_every && i % audit_every == 0) require_clean(s);
  }
  require_clean(s);
  for (int i = 0; i < 2000; ++i) {
    const Key q = rng() % universe;
    auto h = s.search(q);
    auto it = o.upper_bound(q);
    if (it == o.begin()) {
      REQUIRE_FALSE(h.has_value());
    } else {
      REQUIRE(h.has_value());
      REQUIRE(s.key(*h) == std::prev(it)->first);
    }
  }
  CHECK(s.stats().budget_violations == 0);
  return s.stats().max_nodes_touched;
}

}  // namespace

TEST_CASE("finger mode configuration") {
  Config c = finger_cfg();
  c.local_steps = 100;
  CHECK_THROWS_AS(OrderedSet{c}, ConfigError);
  OrderedSet s(finger_cfg());
  CHECK(s.marking_top() == 0);
  CHECK(s.counter_period() >= 1);
  CHECK(s.levels().capacity(2) == 6972);
}

TEST_CASE("finger fuzz: small universe") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) finger_fuzz(seed, 20000, 3000, 55, 250);
}

TEST_CASE("finger fuzz: growth past the second level") {
  finger_fuzz(7, 60000, kKeyMax, 70, 2000);
}

TEST_CASE("finger fuzz with a marking band") {
  Config c = finger_cfg();
  c.marking_levels = 2;
  OrderedSet s(c);
  CHECK(s.marking_top() == 2);
  std::mt19937_64 rng(5);
  std::map<Key, int> o;
  for (int i = 0; i < 30000; ++i) {
    Key k = rng() % 100000;
    if (rng() % 3) {
      s.finger_insert(s.search(k), k);
      ++o[k];
    } else if (auto h = s.lookup(k)) {
      s.finger_delete(*h);
      if (--o[k] == 0) o.erase(k);
    }
    if (i % 1000 == 0) require_clean(s);
  }
  require_clean(s);
  CHECK(s.stats().budget_violations == 0);
}

TEST_CASE("finger search agrees with the oracle and respects locality") {
  OrderedSet s(finger_cfg());
  std::mt19937_64 rng(9);
  std::vector<Key> keys;
  std::optional<Handle> last;
  for (int i = 0; i < 40000; ++i) keys.push_back(rng() >> 1);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<Handle> hs;
  for (Key k : keys) {
    last = s.finger_insert(last, k);
    hs.push_back(*last);
  }
  const auto& lt = s.levels();
  for (int i = 0; i < 20000; ++i) {
    const std::size_t fi = rng() % hs.size();
    const Key y = (i % 2) ? rng() >> 1 : keys[std::min(hs.size() - 1, fi + rng() % 300)] + (rng() % 3);
    auto got = s.finger_search(hs[fi], y);
    auto it = std::upper_bound(keys.begin(), keys.end(), y);
    if (it == keys.begin()) {
      REQUIRE_FALSE(got.has_value());
      continue;
    }
    REQUIRE(got.has_value());
    REQUIRE(s.key(*got) == *std::prev(it));
    const unsigned peak = s.last_op().peak_level;
    if (peak >= 2) {
      const std::size_t ry = static_cast<std::size_t>(std::prev(it) - keys.begin());
      const std::size_t q = ry > fi ? ry - fi : fi - ry;
      REQUIRE(q >= ceil_div(lt.capacity(peak - 1), 10));
    }
  }
}

TEST_CASE("touch ceiling does not grow with n") {
  std::vector<std::uint64_t> maxima;
  for (std::size_t n : {2000u, 20000u, 100000u}) {
    OrderedSet s(finger_cfg());
    std::mt19937_64 rng(n);
    std::optional<Handle> f;
    for (std::size_t i = 0; i < n; ++i) {
      Key k = rng();
      s.finger_insert(s.search(k), k);
    }
    maxima.push_back(s.stats().max_nodes_touched);
    CHECK(s.stats().max_nodes_touched <= 64);
  }
  CHECK(maxima[1] == maxima[2]);
}
