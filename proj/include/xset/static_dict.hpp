#pragma once

#include <variant>
#include <vector>

#include "xset/fks.hpp"
#include "xset/fusion.hpp"

namespace xset {

/// Deterministic static membership dictionary. Large sets (d >= W^{1/eps}) use
/// FKS; smaller ones use a static tree of fusion nodes where membership is a
/// predecessor query followed by one comparison.
class StaticDict {
 public:
  StaticDict() = default;
  StaticDict(std::vector<Key> keys, unsigned word_bits = 64, double eps = 0.125);

  bool contains(Key k, unsigned* probes = nullptr) const;
  bool uses_hashing() const { return impl_.index() == 1; }
  std::size_t size() const { return size_; }
  /// Node degree of the fusion branch, 0 for the hashing branch.
  unsigned degree() const { return degree_; }
  std::uint64_t build_units() const { return build_units_; }
  std::size_t words() const;

  /// d at which hashing takes over: ceil(W^{1/eps}), saturated at 2^64-1.
  static std::uint64_t hashing_threshold(unsigned word_bits, double eps);

 private:
  std::variant<FusionTree, PerfectHash> impl_;
  std::size_t size_ = 0;
  unsigned degree_ = 0;
  std::uint64_t build_units_ = 0;
};

}  // namespace xset
