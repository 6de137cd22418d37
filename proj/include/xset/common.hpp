#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace xset {

using Key = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr Key kKeyMax = ~Key{0};

// Error taxonomy. Each maps to one failure class the harness can report.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchedulerError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Mask with the low w bits set (w in [0, 64]).
constexpr Key low_mask(unsigned w) { return w >= 64 ? kKeyMax : ((Key{1} << w) - 1); }

constexpr unsigned floor_log2(std::uint64_t x) { return x == 0 ? 0 : 63u - static_cast<unsigned>(__builtin_clzll(x)); }

constexpr unsigned ceil_log2(std::uint64_t x) { return x <= 1 ? 0 : floor_log2(x - 1) + 1; }

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0); }

/// Smallest r with r*r >= x.
std::uint64_t ceil_sqrt(std::uint64_t x);

}  // namespace xset
