#include "xset/fusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace xset {

unsigned fusion_capacity(unsigned word_bits) {
  unsigned c = 1;
  while (std::pow(double(c + 1), 6.0) <= double(word_bits)) ++c;
  return std::max(2u, c);
}

FusionNode::FusionNode(std::span<const Key> keys, unsigned cap) {
  if (keys.size() > cap || keys.size() > 8) throw BuildError("fusion node over capacity");
  n_ = static_cast<unsigned>(keys.size());
  for (unsigned i = 0; i < n_; ++i) {
    keys_[i] = keys[i];
    if (i > 0 && keys[i - 1] >= keys[i]) throw BuildError("fusion node keys must be sorted and distinct");
  }
  for (unsigned i = 0; i + 1 < n_; ++i) bit_mask_ |= Key{1} << floor_log2(keys_[i] ^ keys_[i + 1]);
  build_ops_ += n_;

  // spaced multiplier: targets b_j + m_j strictly increasing, all sums b_i + m_j distinct
  unsigned b[8];
  unsigned r = 0;
  for (unsigned pos = 0; pos < 64; ++pos)
    if ((bit_mask_ >> pos) & 1) b[r++] = pos;
  u128 used_lo = 0, used_hi = 0;  // occupied product positions (0..255)
  auto used = [&](unsigned p) { return p < 128 ? ((used_lo >> p) & 1) != 0 : ((used_hi >> (p - 128)) & 1) != 0; };
  auto mark = [&](unsigned p) {
    if (p < 128)
      used_lo |= u128(1) << p;
    else
      used_hi |= u128(1) << (p - 128);
  };
  unsigned m[8];
  unsigned prev_target = 0;
  for (unsigned j = 0; j < r; ++j) {
    unsigned mj = (j == 0) ? 0 : (prev_target + 1 > b[j] ? prev_target + 1 - b[j] : 0);
    for (;; ++mj) {
      bool clash = false;
      for (unsigned i = 0; i < r && !clash; ++i) clash = used(b[i] + mj);
      build_ops_ += r;
      if (!clash) break;
    }
    m[j] = mj;
    for (unsigned i = 0; i < r; ++i) mark(b[i] + mj);
    prev_target = b[j] + mj;
  }
  if (r > 0) {
    if (b[r - 1] + m[r - 1] >= 128) throw BuildError("fusion multiplier does not fit a double word");
    shift_ = b[0] + m[0];
    for (unsigned j = 0; j < r; ++j) {
      mult_ |= u128(1) << m[j];
      out_mask_ |= Key{1} << (b[j] + m[j] - shift_);
    }
    unsigned span = b[r - 1] + m[r - 1] - shift_ + 1;
    if (span > 63) throw BuildError("fusion sketch too wide");
    field_ = span + 1;
  } else {
    field_ = 1;
  }
  if (std::uint64_t(field_) * n_ > 64) throw BuildError("fusion sketches do not pack into one word");
  for (unsigned i = 0; i < n_; ++i) {
    unsigned off = i * field_;
    Key sentinel = Key{1} << (field_ - 1);
    packed_ |= (sentinel | sketch(keys_[i])) << off;
    rep_ |= Key{1} << off;
    tops_ |= sentinel << off;
  }
  build_ops_ += n_;
}

Key FusionNode::sketch(Key x) const {
  if (out_mask_ == 0) return 0;
  u128 prod = u128(x & bit_mask_) * mult_;
  return static_cast<Key>(prod >> shift_) & out_mask_;
}

unsigned FusionNode::count_le(Key s) const {
  // fields holding sentinel|sketch_j minus (s+1): the sentinel survives iff sketch_j > s
  Key diff = packed_ - (s + 1) * rep_;
  return n_ - static_cast<unsigned>(std::popcount(diff & tops_));
}

int FusionNode::pred(Key q) const {
  if (n_ == 0) return -1;
  const unsigned i = count_le(sketch(q));
  unsigned best_e = 64;
  for (unsigned j = (i == 0 ? 0 : i - 1); j <= i && j < n_; ++j) {
    Key x = keys_[j];
    if (x == q) return static_cast<int>(j);
    // smallest top differing bit = longest common prefix
    unsigned e = floor_log2(x ^ q);
    if (best_e == 64 || e < best_e) best_e = e;
  }
  const unsigned e = best_e;
  const Key above = e >= 63 ? 0 : (q & ~low_mask(e + 1));
  if ((q >> e) & 1) {
    Key t = above | low_mask(e);  // common prefix, 0, then ones
    return static_cast<int>(count_le(sketch(t))) - 1;
  }
  Key t = above | (Key{1} << e);  // common prefix, 1, then zeros
  Key st = sketch(t);
  unsigned lt = st == 0 ? 0 : count_le(st - 1);
  return static_cast<int>(lt) - 1;
}

FusionTree::FusionTree(std::vector<Key> keys, unsigned cap) : keys_(std::move(keys)), cap_(cap) {
  if (cap_ < 2) throw BuildError("fusion tree degree must be at least 2");
  for (std::size_t i = 1; i < keys_.size(); ++i)
    if (keys_[i - 1] >= keys_[i]) throw BuildError("fusion tree keys must be sorted and distinct");
  if (keys_.empty()) return;
  // bottom level: blocks of cap keys
  std::vector<Key> level_keys;  // smallest key below each node of the level just built
  level_start_.push_back(0);
  for (std::size_t s = 0; s < keys_.size(); s += cap_) {
    std::size_t e = std::min(keys_.size(), s + cap_);
    nodes_.push_back({FusionNode(std::span<const Key>(keys_.data() + s, e - s), cap_), static_cast<std::uint32_t>(s)});
    build_ops_ += nodes_.back().node.build_ops();
    level_keys.push_back(keys_[s]);
  }
  height_ = 1;
  std::size_t lvl_begin = 0;
  while (level_keys.size() > 1) {
    std::vector<Key> next_keys;
    std::size_t base = nodes_.size();
    level_start_.push_back(static_cast<std::uint32_t>(base));
    for (std::size_t s = 0; s < level_keys.size(); s += cap_) {
      std::size_t e = std::min(level_keys.size(), s + cap_);
      nodes_.push_back(
          {FusionNode(std::span<const Key>(level_keys.data() + s, e - s), cap_), static_cast<std::uint32_t>(lvl_begin + s)});
      build_ops_ += nodes_.back().node.build_ops();
      next_keys.push_back(level_keys[s]);
    }
    lvl_begin = base;
    level_keys.swap(next_keys);
    ++height_;
  }
  root_ = static_cast<std::int64_t>(nodes_.size() - 1);
}

std::int64_t FusionTree::pred(Key q, unsigned* probes) const {
  if (root_ < 0) return -1;
  std::size_t cur = static_cast<std::size_t>(root_);
  for (unsigned lvl = height_; lvl-- > 0;) {
    if (probes) ++*probes;
    const TNode& t = nodes_[cur];
    int i = t.node.pred(q);
    if (i < 0) return -1;  // only possible at the root
    if (lvl == 0) return static_cast<std::int64_t>(t.first) + i;
    cur = t.first + static_cast<std::size_t>(i);
  }
  return -1;
}

std::size_t FusionTree::words() const {
  std::size_t w = keys_.size() + 2;
  for (const auto& t : nodes_) w += t.node.words() + 1;
  return w;
}

}  // namespace xset
