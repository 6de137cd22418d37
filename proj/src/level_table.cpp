#include "xset/level_table.hpp"

#include <algorithm>
#include <cmath>

namespace xset {

double LevelTable::default_alpha(unsigned k) {
  if (k == 2) return std::sqrt(84.0);
  double km1 = double(k - 1);
  return std::max(std::pow(84.0, km1 / k), std::pow(18.0, km1 * km1 / k));
}

LevelTable::LevelTable(unsigned k, double alpha, bool finger_mode) {
  if (k < 2) throw ConfigError("recursion exponent k must be at least 2");
  if (alpha <= 0.0) alpha = default_alpha(k);
  if (alpha <= 1.0) throw ConfigError("level base alpha must exceed 1");
  const double growth = 1.0 + 1.0 / double(k - 1);
  const double log_alpha = std::log2(alpha);
  auto round84 = [](std::uint64_t x) { return ceil_div(x, 84) * 84; };

  n_.push_back(1);
  for (unsigned i = 1; n_.back() < kSaturate; ++i) {
    double lg = log_alpha * std::pow(growth, double(i));
    std::uint64_t v;
    if (lg >= 62.0) {
      v = kSaturate;
    } else {
      // guard against pow() landing a hair above an exact integer
      double raw = std::exp2(lg);
      double near = std::round(raw);
      v = std::fabs(raw - near) < 1e-9 * raw ? static_cast<std::uint64_t>(near) : static_cast<std::uint64_t>(std::ceil(raw));
    }
    v = std::max<std::uint64_t>(v, 84);
    v = round84(v);
    std::uint64_t prev = n_.back();
    if (i >= 2 && u128(prev) * 18 > v) v = round84(prev * 18);
    if (finger_mode && i >= 2 && u128(v) >= u128(prev) * prev) v = prev * prev - 84;
    if (v >= kSaturate) v = kSaturate;
    n_.push_back(v);
  }
}

unsigned LevelTable::height_for(std::uint64_t n) const {
  unsigned h = 1;
  while (capacity(h) < n && h + 1 < n_.size()) ++h;
  return h;
}

}  // namespace xset
