#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xset/common.hpp"
#include "xset/static_search.hpp"

namespace xset {

/// Static distance-sensitive predecessor structure anchored at a stored key x.
/// Rung i covers [x, x + 2^(2^(2^i))); queries beyond the last rung that fits
/// in a word fall back to a search over the whole snapshot.
class RangeLadder {
 public:
  RangeLadder(const std::vector<Key>& sorted_keys, Key x, SVariant v = SVariant::automatic, unsigned word_bits = 64);

  struct Answer {
    std::optional<Key> key;
    int rung = -1;  // -1: answered by the global fallback
  };
  Answer query(Key y, unsigned* probes = nullptr) const;

  Key anchor() const { return x_; }
  std::size_t rungs() const { return rungs_.size(); }
  /// Width exponent of rung i, i.e. log2 of its range length.
  static unsigned rung_bits(unsigned i) { return 1u << (1u << i); }

 private:
  Key x_;
  std::vector<StaticSearch> rungs_;
  StaticSearch global_;
};

}  // namespace xset
