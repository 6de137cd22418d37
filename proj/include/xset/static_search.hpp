#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "xset/common.hpp"
#include "xset/fusion.hpp"
#include "xset/veb.hpp"

namespace xset {

enum class SVariant { sorted, veb, fusion, automatic };

SVariant parse_variant(const std::string& name);
std::string variant_name(SVariant v);

/// Balance of the two terms of the min-expression for one node of d splitters:
/// fusion tree when 1 + log d / log W < log W, trie otherwise (ties go to the trie).
SVariant select_structure(std::size_t d, unsigned word_bits);

/// Immutable predecessor structure over sorted distinct keys.
class StaticSearch {
 public:
  StaticSearch() = default;
  /// v = automatic resolves through select_structure. Throws BuildError on unsorted or duplicate keys.
  StaticSearch(std::vector<Key> keys, SVariant v, unsigned word_bits = 64);

  /// Rank of the largest key <= q, or -1 ("below all").
  std::int64_t pred(Key q, unsigned* probes = nullptr) const;

  std::size_t size() const;
  SVariant variant() const { return resolved_; }
  const std::vector<Key>& keys() const;
  /// Abstract build cost (word operations).
  std::uint64_t build_units() const { return build_units_; }
  /// Storage in machine words.
  std::size_t words() const;

 private:
  std::variant<std::vector<Key>, VebTrie, FusionTree> impl_;
  SVariant resolved_ = SVariant::sorted;
  std::uint64_t build_units_ = 0;
};

}  // namespace xset
