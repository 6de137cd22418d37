#include "xset/veb.hpp"

namespace xset {

VebTrie::VebTrie(std::vector<Key> keys, unsigned word_bits) : keys_(std::move(keys)), w_(word_bits) {
  if (w_ == 0 || w_ > 64) throw BuildError("trie word size must be in [1, 64]");
  const std::size_t d = keys_.size();
  for (std::size_t i = 0; i < d; ++i) {
    if (i > 0 && keys_[i - 1] >= keys_[i]) throw BuildError("trie keys must be sorted and distinct");
    if (keys_[i] > low_mask(w_)) throw BuildError("trie key exceeds word size");
  }
  if (d == 0) return;
  if (d >= PerfectHashCore::kEmpty) throw BuildError("trie too large");

  auto rep_for = [&](std::size_t lo, std::size_t hi, unsigned len) -> std::uint32_t {
    if (len == w_) return static_cast<std::uint32_t>(lo);
    unsigned below = w_ - len - 1;
    bool has0 = ((keys_[lo] >> below) & 1) == 0;
    bool has1 = ((keys_[hi] >> below) & 1) == 1;
    if (has0 && !has1) return static_cast<std::uint32_t>(hi);  // neighbor link is the max leaf
    return static_cast<std::uint32_t>(lo);
  };
  root_rep_ = rep_for(0, d - 1, 0);

  tables_.reserve(w_);
  std::vector<Key> prefixes;
  std::vector<std::uint32_t> reps;
  for (unsigned len = 1; len <= w_; ++len) {
    prefixes.clear();
    reps.clear();
    const unsigned sh = w_ - len;
    std::size_t lo = 0;
    for (std::size_t i = 1; i <= d; ++i) {
      if (i == d || (keys_[i] >> sh) != (keys_[lo] >> sh)) {
        prefixes.push_back(keys_[lo] >> sh);
        reps.push_back(rep_for(lo, i - 1, len));
        lo = i;
      }
    }
    build_ops_ += d + 4 * prefixes.size();
    tables_.emplace_back(prefixes, reps);
  }
}

std::int64_t VebTrie::lookup(unsigned len, Key q) const {
  const unsigned sh = w_ - len;
  const Key prefix = q >> sh;
  std::uint32_t r = tables_[len - 1].probe(prefix);
  if (r == PerfectHashCore::kEmpty) return -1;
  return (keys_[r] >> sh) == prefix ? static_cast<std::int64_t>(r) : -1;
}

std::int64_t VebTrie::finish(unsigned len, std::int64_t rep, Key q) const {
  if (len == w_) return rep;
  // the child on q's side is missing, so the node is unary toward the other side
  const unsigned bit = static_cast<unsigned>((q >> (w_ - len - 1)) & 1);
  return bit ? rep : rep - 1;
}

std::int64_t VebTrie::pred(Key q, unsigned* probes) const {
  if (keys_.empty()) return -1;
  if (q > low_mask(w_)) q = low_mask(w_);
  unsigned lo = 0, hi = w_;
  std::int64_t rep = root_rep_;
  while (lo < hi) {
    unsigned mid = (lo + hi + 1) / 2;
    if (probes) ++*probes;
    std::int64_t r = lookup(mid, q);
    if (r >= 0) {
      lo = mid;
      rep = r;
    } else {
      hi = mid - 1;
    }
  }
  return finish(lo, rep, q);
}

std::int64_t VebTrie::pred_adaptive(Key q, unsigned* probes) const {
  if (keys_.empty()) return -1;
  if (q > low_mask(w_)) q = low_mask(w_);
  unsigned lo = 0;
  std::int64_t rep = root_rep_;
  unsigned hi = w_;
  // exponential phase: lengths 1, 2, 4, ... until a miss
  for (unsigned len = 1;; len *= 2) {
    unsigned l = len < w_ ? len : w_;
    if (probes) ++*probes;
    std::int64_t r = lookup(l, q);
    if (r < 0) {
      hi = l - 1;
      break;
    }
    lo = l;
    rep = r;
    if (l == w_) return finish(lo, rep, q);
  }
  while (lo < hi) {
    unsigned mid = (lo + hi + 1) / 2;
    if (probes) ++*probes;
    std::int64_t r = lookup(mid, q);
    if (r >= 0) {
      lo = mid;
      rep = r;
    } else {
      hi = mid - 1;
    }
  }
  return finish(lo, rep, q);
}

unsigned VebTrie::longest_match(Key q) const {
  if (keys_.empty()) return 0;
  if (q > low_mask(w_)) q = low_mask(w_);
  unsigned lo = 0, hi = w_;
  while (lo < hi) {
    unsigned mid = (lo + hi + 1) / 2;
    if (lookup(mid, q) >= 0)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

std::size_t VebTrie::node_count() const {
  std::size_t c = keys_.empty() ? 0 : 1;
  for (const auto& t : tables_) c += t.size();
  return c;
}

std::size_t VebTrie::words() const {
  std::size_t w = keys_.size() + 3;
  for (const auto& t : tables_) w += t.words();
  return w;
}

}  // namespace xset
