#pragma once

#include <cstdint>
#include <vector>

#include "xset/common.hpp"

namespace xset {

/// Capacities n_0 = 1, n_1, n_2, ... of the exponential search tree.
///
/// n_i = alpha^{(1+1/(k-1))^i}, rounded up to a multiple of 84 for i >= 1 and
/// repaired so n_{i+1} >= 18 n_i. In finger mode every level is additionally
/// pushed below n_i^2. Levels whose capacity would pass 2^62 saturate there.
class LevelTable {
 public:
  static constexpr std::uint64_t kSaturate = std::uint64_t{1} << 62;

  LevelTable() : LevelTable(2, 0.0, false) {}
  /// alpha <= 0 picks the default base for k.
  LevelTable(unsigned k, double alpha, bool finger_mode);

  /// n_i; levels past the table saturate.
  std::uint64_t capacity(unsigned i) const { return i < n_.size() ? n_[i] : n_.back(); }
  /// Latency b_i = n_i / 84 (exact for i >= 1).
  std::uint64_t latency(unsigned i) const { return i == 0 ? 1 : capacity(i) / 84; }
  /// Smallest h >= 1 with n_h >= n.
  unsigned height_for(std::uint64_t n) const;
  std::size_t levels() const { return n_.size(); }
  static double default_alpha(unsigned k);

 private:
  std::vector<std::uint64_t> n_;
};

}  // namespace xset
