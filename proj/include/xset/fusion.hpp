#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xset/common.hpp"

namespace xset {

/// Node capacity used by fusion nodes at word size W: max(2, floor(W^{1/6})).
unsigned fusion_capacity(unsigned word_bits);

/// Fredman-Willard fusion node over at most a handful of keys.
///
/// Distinguishing bits are the top differing bits of adjacent keys. Their
/// approximate sketch is produced by one multiplication with spaced shifts, the
/// sketches are packed into one word with a sentinel bit per field, and a query
/// ranks its own sketch by one subtraction plus popcount. A second ranking of
/// a doctored key fixes the answer when sketch order and key order disagree.
class FusionNode {
 public:
  FusionNode() = default;
  /// keys sorted and distinct, size <= cap. Throws BuildError otherwise.
  FusionNode(std::span<const Key> keys, unsigned cap);

  /// Index of the largest key <= q, or -1.
  int pred(Key q) const;

  std::size_t size() const { return n_; }
  Key key(std::size_t i) const { return keys_[i]; }
  /// Words of storage (keys + sketch machinery).
  std::size_t words() const { return n_ + 6; }
  /// Elementary word operations spent in the build (checked against c*d^4).
  std::uint64_t build_ops() const { return build_ops_; }

  // exposed for tests
  Key sketch(Key x) const;
  unsigned field_bits() const { return field_; }

 private:
  unsigned count_le(Key s) const;

  Key keys_[8] = {};
  unsigned n_ = 0;
  Key bit_mask_ = 0;    // distinguishing bit positions
  u128 mult_ = 0;       // sum of 2^{m_j}
  unsigned shift_ = 0;  // position of the lowest sketch bit in the product
  Key out_mask_ = 0;    // sketch bit positions after shifting
  unsigned field_ = 1;  // bits per packed field including the sentinel
  Key packed_ = 0;      // sentinel|sketch per key, key 0 in the lowest field
  Key rep_ = 0;         // 1 in the lowest bit of every field
  Key tops_ = 0;        // sentinel bit of every field
  std::uint64_t build_ops_ = 0;
};

/// Static B-tree of fusion nodes, degree min(d, cap).
class FusionTree {
 public:
  FusionTree() = default;
  FusionTree(std::vector<Key> keys, unsigned cap);

  /// Index of the largest key <= q, or -1. probes counts nodes visited.
  std::int64_t pred(Key q, unsigned* probes = nullptr) const;

  std::size_t size() const { return keys_.size(); }
  unsigned height() const { return height_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t words() const;
  std::uint64_t build_ops() const { return build_ops_; }
  unsigned capacity() const { return cap_; }
  const std::vector<Key>& keys() const { return keys_; }

 private:
  struct TNode {
    FusionNode node;
    std::uint32_t first;  // first child node index, or first key index at the bottom
  };
  std::vector<Key> keys_;
  std::vector<TNode> nodes_;
  std::int64_t root_ = -1;
  unsigned height_ = 0;
  unsigned cap_ = 2;
  std::vector<std::uint32_t> level_start_;  // nodes_ index where each level begins (bottom first)
  std::uint64_t build_ops_ = 0;
};

}  // namespace xset
