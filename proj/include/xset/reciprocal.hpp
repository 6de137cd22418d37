#pragma once

#include "xset/common.hpp"

namespace xset {

/// Division by an invariant divisor without a divide instruction.
/// r = floor(2^W / p); the estimate floor(x*r / 2^W) is at most one short
/// of floor(x/p) and is fixed by a single comparison.
class Reciprocal {
 public:
  Reciprocal() = default;
  Reciprocal(std::uint64_t p, unsigned word_bits = 64);

  std::uint64_t divisor() const { return p_; }
  std::uint64_t r() const { return r_; }
  unsigned word_bits() const { return w_; }

  /// First estimate before correction, exposed for tests.
  std::uint64_t estimate(std::uint64_t x) const { return static_cast<std::uint64_t>((u128(x) * r_) >> w_); }

  std::uint64_t div(std::uint64_t x) const {
    std::uint64_t q = estimate(x);
    // one test: the remainder can be at most 2p-1
    if (x - q * p_ >= p_) ++q;
    return q;
  }
  std::uint64_t mod(std::uint64_t x) const { return x - div(x) * p_; }

 private:
  std::uint64_t p_ = 1;
  std::uint64_t r_ = 0;
  unsigned w_ = 64;
};

}  // namespace xset
