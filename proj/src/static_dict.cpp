#include "xset/static_dict.hpp"

#include <algorithm>
#include <cmath>

namespace xset {

std::uint64_t StaticDict::hashing_threshold(unsigned word_bits, double eps) {
  double t = std::pow(double(word_bits), 1.0 / eps);
  if (t >= 1.8e19) return kKeyMax;
  return static_cast<std::uint64_t>(std::ceil(t));
}

StaticDict::StaticDict(std::vector<Key> keys, unsigned word_bits, double eps) {
  if (!(eps > 0.0 && eps < 1.0 / 6.0)) throw ConfigError("dictionary epsilon must be in (0, 1/6)");
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) throw BuildError("duplicate keys in dictionary");
  size_ = keys.size();
  if (size_ >= hashing_threshold(word_bits, eps)) {
    PerfectHash h(std::move(keys));
    build_units_ = h.cells() + 3 * size_;
    impl_ = std::move(h);
    return;
  }
  // degree O(d^{1/3}), clipped by what one hardware-word fusion node holds
  unsigned want = static_cast<unsigned>(std::ceil(std::cbrt(double(std::max<std::size_t>(size_, 1)))));
  degree_ = std::max(2u, std::min(fusion_capacity(word_bits), want));
  FusionTree t(std::move(keys), degree_);
  build_units_ = t.build_ops();
  impl_ = std::move(t);
}

bool StaticDict::contains(Key k, unsigned* probes) const {
  if (impl_.index() == 1) return std::get<1>(impl_).lookup(k, probes).has_value();
  const FusionTree& t = std::get<0>(impl_);
  std::int64_t i = t.pred(k, probes);
  return i >= 0 && t.keys()[static_cast<std::size_t>(i)] == k;
}

std::size_t StaticDict::words() const {
  return impl_.index() == 1 ? std::get<1>(impl_).words() : std::get<0>(impl_).words();
}

}  // namespace xset
