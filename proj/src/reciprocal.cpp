#include "xset/reciprocal.hpp"

namespace xset {

std::uint64_t ceil_sqrt(std::uint64_t x) {
  if (x == 0) return 0;
  std::uint64_t r = 1;
  while (u128(r) * r < x) r <<= 1;
  std::uint64_t lo = r >> 1, hi = r;  // lo*lo < x <= hi*hi
  while (hi - lo > 1) {
    std::uint64_t mid = lo + ((hi - lo) >> 1);
    if (u128(mid) * mid >= x)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

Reciprocal::Reciprocal(std::uint64_t p, unsigned word_bits) : p_(p), w_(word_bits) {
  if (p == 0) throw DomainError("reciprocal of zero divisor");
  if (word_bits == 0 || word_bits > 64) throw DomainError("word size must be in [1, 64]");
  // floor(2^W / p) by shift-and-subtract, W steps, no divide instruction
  u128 rem = 0;
  u128 q = 0;
  for (int bit = static_cast<int>(w_); bit >= 0; --bit) {
    rem = (rem << 1) | (bit == static_cast<int>(w_) ? 1 : 0);
    q <<= 1;
    if (rem >= p) {
      rem -= p;
      q |= 1;
    }
  }
  // p = 1 at W = 64 gives 2^64, which does not fit; 2^64-1 keeps the estimate within one
  r_ = q > u128(kKeyMax) ? kKeyMax : static_cast<std::uint64_t>(q);
}

}  // namespace xset
