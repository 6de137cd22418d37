#pragma once

#include <cstdint>
#include <vector>

#include "xset/common.hpp"
#include "xset/fks.hpp"

namespace xset {

/// Plain binary trie of height W with one perfect hash table per prefix length.
///
/// Each stored trie node keeps a single representative leaf index. For a node
/// with only a 0-child it is the largest leaf below, for a node with only a
/// 1-child the smallest leaf below; so the neighbor link of a unary node is
/// either the representative itself or the leaf just before it. The
/// representative also lets a probe confirm the prefix against the key array.
class VebTrie {
 public:
  VebTrie() = default;
  VebTrie(std::vector<Key> keys, unsigned word_bits);

  /// Binary search over prefix lengths. Returns index of largest key <= q or -1.
  std::int64_t pred(Key q, unsigned* probes = nullptr) const;
  /// Exponential-then-binary search over prefix lengths; same answers.
  std::int64_t pred_adaptive(Key q, unsigned* probes = nullptr) const;

  /// Length of the longest prefix of q shared with a stored key (0..W).
  unsigned longest_match(Key q) const;

  std::size_t size() const { return keys_.size(); }
  unsigned word_bits() const { return w_; }
  std::size_t node_count() const;
  std::size_t words() const;
  std::uint64_t build_ops() const { return build_ops_; }
  const std::vector<Key>& keys() const { return keys_; }

 private:
  /// Representative for prefix length len if that prefix of q is present, else -1.
  std::int64_t lookup(unsigned len, Key q) const;
  std::int64_t finish(unsigned len, std::int64_t rep, Key q) const;

  std::vector<Key> keys_;
  unsigned w_ = 64;
  std::int64_t root_rep_ = -1;
  std::vector<PerfectHashCore> tables_;  // index len-1 for len in [1, W]
  std::uint64_t build_ops_ = 0;
};

}  // namespace xset
