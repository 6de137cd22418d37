#include "xset/fks.hpp"

#include <algorithm>
#include <array>
#include <atomic>

namespace xset {

bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t f = 3; f * f <= n; f += 2)
    if (n % f == 0) return false;
  return true;
}

namespace {
constexpr unsigned kClasses = 48;
constexpr unsigned kPerClass = 4;
std::array<std::atomic<std::uint64_t>, kClasses * kPerClass> g_prime_cache{};
}  // namespace

std::uint64_t fks_prime(unsigned size_class, unsigned nth) {
  if (size_class >= kClasses || nth >= kPerClass) throw BuildError("fks prime class out of range");
  auto& slot = g_prime_cache[size_class * kPerClass + nth];
  std::uint64_t v = slot.load(std::memory_order_relaxed);
  if (v != 0) return v;
  std::uint64_t start = nth == 0 ? (std::uint64_t{1} << size_class) : fks_prime(size_class, nth - 1) + 1;
  std::uint64_t c = start | 1;
  while (!is_prime_trial(c)) c += 2;
  slot.store(c, std::memory_order_relaxed);  // every thread computes the same value
  return c;
}

PerfectHashCore::PerfectHashCore(std::span<const Key> keys, std::span<const std::uint32_t> payloads) {
  d_ = keys.size();
  if (d_ == 0) {
    buckets_.push_back({0, 0});
    return;
  }
  if (payloads.size() != d_) throw BuildError("payload count mismatch");
  // universe reduction prime of size about d^2 * 64
  unsigned cls = std::max(8u, 2 * ceil_log2(d_) + 6);
  for (unsigned nth = 0; nth < kPerClass; ++nth) {
    if (try_build(keys, payloads, fks_prime(cls, nth))) return;
  }
  // the next class up is practically never needed; keep searching deterministically
  for (unsigned c = cls + 1; c < 40; ++c)
    for (unsigned nth = 0; nth < kPerClass; ++nth)
      if (try_build(keys, payloads, fks_prime(c, nth))) return;
  throw BuildError("fks construction exhausted its candidates");
}

bool PerfectHashCore::try_build(std::span<const Key> keys, std::span<const std::uint32_t> payloads,
                                std::uint64_t p) {
  p_ = p;
  rp_ = Reciprocal(p);
  rd_ = Reciprocal(d_);
  const unsigned pbits = floor_log2(p) + 1;
  if (2 * pbits <= 64) {
    chunk_bits_ = 64;
    chunks_ = 1;
  } else {
    // r << c and a * piece must each stay below 2^63
    chunk_bits_ = 63 - pbits;
    chunks_ = static_cast<int>(ceil_div(pbits, chunk_bits_));
  }
  constexpr std::uint64_t kTopTries = 1u << 16;
  constexpr std::uint64_t kBucketTries = 1u << 20;

  std::vector<std::uint64_t> ys(d_);
  for (std::size_t i = 0; i < d_; ++i) ys[i] = rp_.mod(keys[i]);

  std::vector<std::uint32_t> count(d_);
  std::vector<std::uint32_t> bucket_of(d_);
  bool found = false;
  for (std::uint64_t j = 0; j < kTopTries; ++j) {
    const std::uint64_t a = multiplier(j);
    std::fill(count.begin(), count.end(), 0);
    std::size_t sq = 0;
    for (std::size_t i = 0; i < d_; ++i) {
      std::uint32_t h = static_cast<std::uint32_t>(rd_.mod(mulmod(a, ys[i])));
      bucket_of[i] = h;
      sq += 2 * std::size_t(count[h]) + 1;  // (c+1)^2 - c^2
      ++count[h];
    }
    if (sq < 3 * d_) {
      a_ = a;
      sum_sq_ = sq;
      found = true;
      break;
    }
  }
  if (!found) return false;

  // group key indices by bucket
  std::vector<std::uint32_t> start(d_ + 1, 0);
  for (std::size_t i = 0; i < d_; ++i) ++start[bucket_of[i] + 1];
  for (std::size_t h = 0; h < d_; ++h) start[h + 1] += start[h];
  std::vector<std::uint32_t> order(d_);
  {
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < d_; ++i) order[fill[bucket_of[i]]++] = static_cast<std::uint32_t>(i);
  }

  buckets_.assign(d_ + 1, Bucket{0, 0});
  cells_.clear();
  std::vector<std::uint32_t> scratch;
  for (std::size_t h = 0; h < d_; ++h) {
    const std::uint32_t b = start[h + 1] - start[h];
    buckets_[h].offset = static_cast<std::uint32_t>(cells_.size());
    if (b == 0) continue;
    // equal residues cannot be separated by any multiplier: try another prime
    for (std::uint32_t u = start[h]; u < start[h + 1]; ++u)
      for (std::uint32_t v = u + 1; v < start[h + 1]; ++v)
        if (ys[order[u]] == ys[order[v]]) return false;
    const std::uint64_t width = std::uint64_t{1} << ceil_log2(std::uint64_t(b) * b);
    bool ok = false;
    for (std::uint64_t j = 0; j < kBucketTries; ++j) {
      const std::uint64_t a = multiplier(j);
      scratch.assign(width, kEmpty);
      ok = true;
      for (std::uint32_t u = start[h]; u < start[h + 1]; ++u) {
        std::uint32_t i = order[u];
        std::uint64_t slot = mulmod(a, ys[i]) & (width - 1);
        if (scratch[slot] != kEmpty) {
          ok = false;
          break;
        }
        scratch[slot] = payloads[i];
      }
      if (ok) {
        buckets_[h].mult = static_cast<std::uint32_t>(j);
        break;
      }
    }
    if (!ok) return false;
    cells_.insert(cells_.end(), scratch.begin(), scratch.end());
  }
  buckets_[d_].offset = static_cast<std::uint32_t>(cells_.size());
  return true;
}

std::int64_t PerfectHashCore::locate(Key x) const {
  if (d_ == 0) return -1;
  const std::uint64_t y = rp_.mod(x);
  const std::uint64_t h = rd_.mod(mulmod(a_, y));
  const std::uint32_t width = buckets_[h + 1].offset - buckets_[h].offset;
  if (width == 0) return -1;
  return buckets_[h].offset + static_cast<std::int64_t>(mulmod(multiplier(buckets_[h].mult), y) & (width - 1));
}

PerfectHash::PerfectHash(std::vector<Key> keys) : keys_(std::move(keys)) {
  std::vector<Key> sorted = keys_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw BuildError("duplicate keys in perfect hash");
  std::vector<std::uint32_t> payloads(keys_.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) payloads[i] = static_cast<std::uint32_t>(i);
  core_ = PerfectHashCore(keys_, payloads);
}

std::size_t PerfectHash::count_collisions() const {
  std::vector<std::int64_t> pos(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) pos[i] = core_.locate(keys_[i]);
  std::sort(pos.begin(), pos.end());
  std::size_t c = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] < 0) ++c;  // a stored key landing in an empty bucket is also a failure
    else if (i + 1 < pos.size() && pos[i] == pos[i + 1]) ++c;
  }
  return c;
}

}  // namespace xset
