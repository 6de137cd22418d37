#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "xset/fusion.hpp"
#include "xset/static_search.hpp"
#include "xset/veb.hpp"

using namespace xset;

namespace {
std::int64_t oracle(const std::vector<Key>& k, Key q) {
  return static_cast<std::int64_t>(std::upper_bound(k.begin(), k.end(), q) - k.begin()) - 1;
}
std::vector<Key> random_set(std::mt19937_64& rng, std::size_t n, unsigned w) {
  std::set<Key> s;
  while (s.size() < n) s.insert(rng() & low_mask(w));
  return {s.begin(), s.end()};
}
}  // namespace

TEST_CASE("veb: worked example on a 4-bit universe") {
  VebTrie t({2, 9, 12}, 4);
  CHECK(t.pred(10) == 1);
  CHECK(t.longest_match(10) == 2);
  CHECK(t.pred(1) == -1);
  CHECK(t.pred(12) == 2);
  CHECK(t.pred(15) == 2);
  for (Key q = 0; q < 16; ++q) CHECK(t.pred(q) == oracle({2, 9, 12}, q));
}

TEST_CASE("veb: empty") {
  VebTrie t({}, 64);
  CHECK(t.pred(5) == -1);
  CHECK(t.pred_adaptive(5) == -1);
}

TEST_CASE("veb: exhaustive over small universes") {
  std::mt19937_64 rng(3);
  for (unsigned w : {1u, 2u, 5u, 8u, 12u}) {
    for (int round = 0; round < 20; ++round) {
      std::size_t n = 1 + rng() % std::min<std::uint64_t>(200, 1ull << w);
      auto keys = random_set(rng, n, w);
      VebTrie t(keys, w);
      const unsigned bound = ceil_log2(w + 1) + 2;
      for (Key q = 0; q < (Key{1} << w); ++q) {
        unsigned p1 = 0, p2 = 0;
        auto want = oracle(keys, q);
        REQUIRE(t.pred(q, &p1) == want);
        REQUIRE(t.pred_adaptive(q, &p2) == want);
        CHECK(p1 <= bound);
      }
    }
  }
}

TEST_CASE("veb: random 64-bit queries, both paths agree") {
  std::mt19937_64 rng(4);
  auto keys = random_set(rng, 3000, 64);
  VebTrie t(keys, 64);
  for (int i = 0; i < 20000; ++i) {
    Key q = (i % 3 == 0) ? keys[rng() % keys.size()] + (rng() % 3) - 1 : rng();
    unsigned p = 0;
    auto a = t.pred(q, &p);
    CHECK(a == oracle(keys, q));
    CHECK(t.pred_adaptive(q) == a);
    CHECK(p <= ceil_log2(65) + 2);
  }
}

TEST_CASE("veb: adaptive probes grow with the distinguishing prefix") {
  // keys share a top prefix of length b with the query, then diverge
  unsigned prev = 0;
  for (unsigned b : {1u, 2u, 4u, 8u, 16u, 32u, 63u}) {
    std::vector<Key> keys;
    Key base = Key{1} << 63;
    for (Key j = 0; j < 16; ++j) keys.push_back(base | (j << 2));
    std::sort(keys.begin(), keys.end());
    // query agrees with the keys on bits 63 down to 64-b+1, differs at position 64-b
    Key q = (b == 1) ? 0 : (base ^ (Key{1} << (64 - b)));
    VebTrie t(keys, 64);
    unsigned pr = 0;
    CHECK(t.pred_adaptive(q, &pr) == oracle(keys, q));
    CHECK(pr <= 3 * (floor_log2(b) + 1));
    CHECK(pr >= prev);
    prev = pr;
  }
}

TEST_CASE("fusion: two keys, three regions") {
  CHECK(fusion_capacity(64) == 2);
  FusionNode n(std::vector<Key>{100, 5000}, 2);
  CHECK(n.pred(99) == -1);
  CHECK(n.pred(100) == 0);
  CHECK(n.pred(4999) == 0);
  CHECK(n.pred(5000) == 1);
  CHECK(n.pred(kKeyMax) == 1);
}

TEST_CASE("fusion: exhaustive 2-key subsets of an 8-bit universe") {
  std::uint64_t bad = 0;
  for (Key a = 0; a < 256; ++a)
    for (Key b = a + 1; b < 256; ++b) {
      std::vector<Key> k{a, b};
      FusionNode n(k, 2);
      for (Key q = 0; q < 256; ++q) bad += n.pred(q) != oracle(k, q);
    }
  CHECK(bad == 0);
}

TEST_CASE("fusion: wider nodes up to eight keys") {
  std::mt19937_64 rng(8);
  std::uint64_t bad = 0, built = 0;
  for (int round = 0; round < 3000; ++round) {
    std::size_t n = 1 + rng() % 8;
    auto keys = random_set(rng, n, round % 2 ? 10 : 64);
    try {
      FusionNode f(keys, 8);
      ++built;
      CHECK(f.build_ops() <= 64 * n * n * n * n + 64);
      for (int i = 0; i < 200; ++i) {
        Key q = round % 2 ? rng() % 1024 : (i % 2 ? rng() : keys[rng() % n] + rng() % 5 - 2);
        bad += f.pred(q) != oracle(keys, q);
      }
    } catch (const BuildError&) {
      // sketches of that many keys may not pack into one word
    }
  }
  CHECK(bad == 0);
  CHECK(built > 1000);
}

TEST_CASE("fusion: over capacity is a build error") {
  CHECK_THROWS_AS(FusionNode(std::vector<Key>{1, 2, 3}, 2), BuildError);
}

TEST_CASE("fusion tree: oracle and probe bound") {
  std::mt19937_64 rng(9);
  for (std::size_t d : {1, 2, 3, 7, 64, 100, 999, 1000}) {
    auto keys = random_set(rng, d, 64);
    FusionTree t(keys, 2);
    unsigned bound = static_cast<unsigned>(std::ceil(std::log2(double(std::max<std::size_t>(d, 1))))) + 1;
    for (int i = 0; i < 3000; ++i) {
      Key q = i % 2 ? rng() : keys[rng() % d] - (rng() % 2);
      unsigned pr = 0;
      CHECK(t.pred(q, &pr) == oracle(keys, q));
      CHECK(pr <= bound);
    }
  }
  FusionTree single(std::vector<Key>{5, 9}, 2);
  unsigned pr = 0;
  CHECK(single.pred(7, &pr) == 0);
  CHECK(pr == 1);
}

TEST_CASE("select_structure: both sides of the balance") {
  for (unsigned w : {4u, 8u, 16u, 32u, 64u}) CHECK(select_structure(2, w) == SVariant::fusion);
  CHECK(select_structure(1u << 10, 64) == SVariant::fusion);
  CHECK(select_structure(7056, 64) == SVariant::fusion);
  CHECK(select_structure(std::size_t{1} << 60, 64) == SVariant::veb);
  CHECK(select_structure(std::size_t{1} << 30, 64) == SVariant::veb);  // exact tie
}

TEST_CASE("static search: all variants agree, empty answers below all") {
  std::mt19937_64 rng(10);
  for (auto v : {SVariant::sorted, SVariant::veb, SVariant::fusion, SVariant::automatic}) {
    StaticSearch e({}, v);
    CHECK(e.pred(123) == -1);
    for (unsigned w : {12u, 64u}) {
      auto keys = random_set(rng, 500, w);
      StaticSearch s(keys, v, w);
      for (int i = 0; i < 4000; ++i) {
        Key q = rng() & low_mask(w);
        CHECK(s.pred(q) == oracle(keys, q));
      }
    }
  }
  CHECK_THROWS_AS(StaticSearch({3, 3}, SVariant::sorted), BuildError);
}

TEST_CASE("static search: veb build units linear in d at fixed W") {
  std::mt19937_64 rng(12);
  for (std::size_t d : {100, 1000, 10000}) {
    StaticSearch s(random_set(rng, d, 64), SVariant::veb);
    CHECK(s.build_units() <= 6 * 64 * d);
  }
}
