#include "xset/ladder.hpp"

#include <algorithm>
#include <cmath>

namespace xset {

RangeLadder::RangeLadder(const std::vector<Key>& keys, Key x, SVariant v, unsigned word_bits) : x_(x) {
  if (!std::binary_search(keys.begin(), keys.end(), x)) throw ContractViolation("ladder anchor must be stored");
  // i runs to ceil(log log d), and no further than a rung that still fits in a word
  const double d = std::max<double>(4.0, static_cast<double>(keys.size()));
  const unsigned imax = static_cast<unsigned>(std::ceil(std::log2(std::log2(d))));
  auto lo = std::lower_bound(keys.begin(), keys.end(), x);
  for (unsigned i = 0; i <= imax && rung_bits(i) < word_bits && rung_bits(i) < 64; ++i) {
    const Key span = Key{1} << rung_bits(i);
    const Key end = x > kKeyMax - span ? kKeyMax : x + span;  // exclusive unless clamped
    auto hi = std::lower_bound(lo, keys.end(), end);
    if (end == kKeyMax && hi != keys.end() && *hi == kKeyMax) ++hi;
    rungs_.emplace_back(std::vector<Key>(lo, hi), v, word_bits);
  }
  global_ = StaticSearch(keys, v, word_bits);
}

RangeLadder::Answer RangeLadder::query(Key y, unsigned* probes) const {
  Answer a;
  if (y >= x_) {
    const Key dist = y - x_;
    for (unsigned i = 0; i < rungs_.size(); ++i) {
      if (probes) ++*probes;  // the range test
      if (dist < (Key{1} << rung_bits(i))) {
        const auto& s = rungs_[i];
        std::int64_t j = s.pred(y, probes);
        a.rung = static_cast<int>(i);
        if (j >= 0) a.key = s.keys()[static_cast<std::size_t>(j)];
        return a;
      }
    }
  }
  std::int64_t j = global_.pred(y, probes);
  if (j >= 0) a.key = global_.keys()[static_cast<std::size_t>(j)];
  return a;
}

}  // namespace xset
