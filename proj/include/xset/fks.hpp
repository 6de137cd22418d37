#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "xset/common.hpp"
#include "xset/reciprocal.hpp"

namespace xset {

/// Two-level FKS table that stores a 32-bit payload per key. Membership is
/// confirmed by the caller, who knows how to recover the key from a payload
/// (the trie verifies prefixes against its key array this way).
///
/// Hash: y = x mod p (injective on the key set), bucket = ((a*y) mod p) mod d,
/// cell = ((a_b*y) mod p) & (2^t - 1) with 2^t >= b^2. Every mod by a
/// non-power-of-two goes through Reciprocal.
///
/// Multipliers range over all of [1, p). Candidate j is a fixed mix of j reduced
/// mod p, so buckets only store the index j. a*y can exceed a word, so the
/// product is reduced chunk by chunk (Horner on c-bit pieces of y).
class PerfectHashCore {
 public:
  static constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;

  PerfectHashCore() = default;
  PerfectHashCore(std::span<const Key> keys, std::span<const std::uint32_t> payloads);

  std::size_t size() const { return d_; }

  /// Payload stored in the cell the key hashes to (kEmpty if none). The caller
  /// must verify it. Touches at most two cells: the bucket header and the slot.
  std::uint32_t probe(Key x, unsigned* probes = nullptr) const {
    if (d_ == 0) {
      if (probes) *probes += 1;
      return kEmpty;
    }
    const std::uint64_t y = rp_.mod(x);
    const std::uint64_t h = rd_.mod(mulmod(a_, y));
    const Bucket& b = buckets_[h];
    const std::uint32_t width = buckets_[h + 1].offset - b.offset;
    if (probes) *probes += (width == 0 ? 1 : 2);
    if (width == 0) return kEmpty;
    const std::uint64_t slot = mulmod(multiplier(b.mult), y) & (width - 1);
    return cells_[b.offset + slot];
  }

  /// Absolute cell index the key hashes to, or -1 for an empty bucket.
  std::int64_t locate(Key x) const;

  std::size_t cells() const { return cells_.size(); }
  std::size_t buckets() const { return d_; }
  /// Sum of squared bucket sizes chosen by the top-level search.
  std::size_t sum_sq() const { return sum_sq_; }
  std::uint64_t prime() const { return p_; }
  std::uint64_t top_multiplier() const { return a_; }
  /// Machine words used (bucket headers count as one word each, cells as half).
  std::size_t words() const { return 4 + buckets_.size() + (cells_.size() + 1) / 2; }

  /// Raw state, used by determinism tests.
  const std::vector<std::uint32_t>& raw_cells() const { return cells_; }

 private:
  struct Bucket {
    std::uint32_t offset;
    std::uint32_t mult;  // index into the multiplier sequence
  };
  bool try_build(std::span<const Key> keys, std::span<const std::uint32_t> payloads, std::uint64_t p);

  /// (a*y) mod p for a, y < p.
  std::uint64_t mulmod(std::uint64_t a, std::uint64_t y) const {
    if (chunks_ == 1) return rp_.mod(a * y);
    std::uint64_t r = 0;
    for (int i = chunks_ - 1; i >= 0; --i) {
      const std::uint64_t piece = (y >> (unsigned(i) * chunk_bits_)) & low_mask(chunk_bits_);
      r = rp_.mod((r << chunk_bits_) + a * piece);
    }
    return r;
  }
  /// j-th candidate multiplier in [1, p).
  std::uint64_t multiplier(std::uint64_t j) const {
    std::uint64_t z = (j + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    const std::uint64_t a = rp_.mod(z);
    return a == 0 ? 1 : a;
  }

  std::size_t d_ = 0;
  std::uint64_t p_ = 1;
  Reciprocal rp_;
  Reciprocal rd_;
  std::uint64_t a_ = 1;
  unsigned chunk_bits_ = 64;
  int chunks_ = 1;
  std::size_t sum_sq_ = 0;
  std::vector<Bucket> buckets_;  // d_ + 1 entries; last is a sentinel offset
  std::vector<std::uint32_t> cells_;
};

/// Primes used for universe reduction, found by trial division and cached per
/// size class. Class c is the first prime >= 2^c.
std::uint64_t fks_prime(unsigned size_class, unsigned nth = 0);
bool is_prime_trial(std::uint64_t n);

/// Self-contained FKS dictionary over distinct keys; lookup returns the index of
/// the key in the build input.
class PerfectHash {
 public:
  PerfectHash() = default;
  explicit PerfectHash(std::vector<Key> keys);

  std::optional<std::size_t> lookup(Key k, unsigned* probes = nullptr) const {
    std::uint32_t idx = core_.probe(k, probes);
    if (idx == PerfectHashCore::kEmpty || keys_[idx] != k) return std::nullopt;
    return idx;
  }
  std::size_t size() const { return keys_.size(); }
  std::size_t cells() const { return core_.cells(); }
  std::size_t sum_sq() const { return core_.sum_sq(); }
  std::size_t words() const { return core_.words() + keys_.size(); }
  const PerfectHashCore& core() const { return core_; }
  const std::vector<Key>& keys() const { return keys_; }

  /// Direct scan for two stored keys that share a final cell. Returns the count.
  std::size_t count_collisions() const;

 private:
  std::vector<Key> keys_;
  PerfectHashCore core_;
};

}  // namespace xset
