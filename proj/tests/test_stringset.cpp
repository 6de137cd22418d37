#include <doctest.h>

#include <map>
#include <random>

#include "xset/stringset.hpp"

using namespace xset;
using Str = StringSet::Str;

namespace {

void require_clean(const StringSet& s) {
  auto a = s.audit();
  for (auto& v : a.violations) MESSAGE(v);
  CHECK(a.coverage_violations == 0);
  REQUIRE(a.ok());
}

Str random_string(std::mt19937_64& rng, Key alphabet) {
  Str s(1 + rng() % 20);
  for (auto& c : s) c = rng() % alphabet;
  return s;
}

}  // namespace

TEST_CASE("empty string set") {
  StringSet s;
  CHECK_FALSE(s.search({1, 2}).has_value());
  CHECK(s.lcp_length({1, 2}) == 0);
  CHECK_FALSE(s.erase({1}));
  require_clean(s);
}

TEST_CASE("branching and predecessor examples") {
  StringSet s;
  s.insert({'a', 'b'});
  s.insert({'a', 'c'});
  CHECK(s.lcp_length({'a', 'd'}) == 1);
  CHECK(s.search({'a', 'd'}) == Str{'a', 'c'});
  CHECK(s.search({'a', 'b'}) == Str{'a', 'b'});
  CHECK(s.search({'a', 'b', 'z'}) == Str{'a', 'b'});
  CHECK(s.search({'a'}) == std::nullopt);
  CHECK(s.search({'b'}) == Str{'a', 'c'});
  s.insert({'a'});
  CHECK(s.search({'a', 'a'}) == Str{'a'});
  require_clean(s);
}

TEST_CASE("insert then delete restores the structure") {
  StringSet s;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) s.insert(random_string(rng, 3));
  auto before = s.audit();
  const auto space = s.space_units();
  Str x{2, 2, 2, 0, 1, 9};
  s.insert(x);
  CHECK(s.erase(x));
  auto after = s.audit();
  CHECK(after.internal_nodes == before.internal_nodes);
  CHECK(after.leaves == before.leaves);
  CHECK(s.space_units() == space);
}

TEST_CASE("reserved character") {
  StringSet s;
  CHECK_THROWS_AS(s.insert({kKeyMax}), DomainError);
}

TEST_CASE("thresholds") {
  StringSet s;
  CHECK(s.heavy_threshold(1024) == 64);
  CHECK(s.rebuild_period(1024) == 16);
}

TEST_CASE("oracle fuzz over small alphabets") {
  for (Key alphabet : {2u, 5u, 300u}) {
    StringSet s;
    std::map<Str, int> o;
    std::size_t n = 0;
    std::mt19937_64 rng(alphabet);
    for (int i = 0; i < 20000; ++i) {
      Str x = random_string(rng, alphabet);
      const int r = static_cast<int>(rng() % 10);
      if (r < 5) {
        s.insert(x);
        ++o[x];
        ++n;
      } else if (r < 7) {
        auto it = o.lower_bound(x);
        if (it != o.end() && rng() % 2) x = it->first;
        const bool had = o.count(x) > 0;
        REQUIRE(s.erase(x) == had);
        if (had && --o[x] == 0) o.erase(x);
        if (had) --n;
      } else {
        auto got = s.search(x);
        auto it = o.upper_bound(x);
        if (it == o.begin())
          REQUIRE_FALSE(got.has_value());
        else
          REQUIRE(got == std::prev(it)->first);
      }
      REQUIRE(s.size() == n);
      if (i % 2000 == 0) require_clean(s);
    }
    require_clean(s);
  }
}

TEST_CASE("a fast-growing child reaches the dictionary in time") {
  StringSet s;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 2000; ++i) s.insert({rng() % 1000 + 10, rng(), rng()});
  for (int i = 0; i < 3000; ++i) {
    s.insert({7, rng()});
    REQUIRE(s.audit().coverage_violations == 0);
  }
  CHECK(s.stats().heavy_rebuilds > 0);
  CHECK(s.stats().heavy_hits > 0);
}
