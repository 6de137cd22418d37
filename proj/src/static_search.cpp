#include "xset/static_search.hpp"

#include <algorithm>
#include <cmath>

namespace xset {

SVariant parse_variant(const std::string& name) {
  if (name == "sorted") return SVariant::sorted;
  if (name == "veb") return SVariant::veb;
  if (name == "fusion") return SVariant::fusion;
  if (name == "auto") return SVariant::automatic;
  throw ConfigError("unknown static structure variant: " + name);
}

std::string variant_name(SVariant v) {
  switch (v) {
    case SVariant::sorted: return "sorted";
    case SVariant::veb: return "veb";
    case SVariant::fusion: return "fusion";
    case SVariant::automatic: return "auto";
  }
  return "?";
}

SVariant select_structure(std::size_t d, unsigned word_bits) {
  if (d <= 1) return SVariant::fusion;
  const double lw = std::log2(double(word_bits));
  const double fusion_side = 1.0 + std::log2(double(d)) / lw;
  return fusion_side < lw ? SVariant::fusion : SVariant::veb;
}

StaticSearch::StaticSearch(std::vector<Key> keys, SVariant v, unsigned word_bits) {
  for (std::size_t i = 1; i < keys.size(); ++i)
    if (keys[i - 1] >= keys[i]) throw BuildError("static search keys must be sorted and distinct");
  resolved_ = v == SVariant::automatic ? select_structure(keys.size(), word_bits) : v;
  switch (resolved_) {
    case SVariant::veb: {
      VebTrie t(std::move(keys), word_bits);
      build_units_ = t.build_ops();
      impl_ = std::move(t);
      break;
    }
    case SVariant::fusion: {
      FusionTree t(std::move(keys), fusion_capacity(word_bits));
      build_units_ = t.build_ops();
      impl_ = std::move(t);
      break;
    }
    default:
      build_units_ = keys.size();
      impl_ = std::move(keys);
      resolved_ = SVariant::sorted;
  }
}

std::int64_t StaticSearch::pred(Key q, unsigned* probes) const {
  switch (impl_.index()) {
    case 1: return std::get<1>(impl_).pred(q, probes);
    case 2: return std::get<2>(impl_).pred(q, probes);
    default: {
      const auto& k = std::get<0>(impl_);
      if (probes) *probes += k.empty() ? 1 : ceil_log2(k.size()) + 1;
      return static_cast<std::int64_t>(std::upper_bound(k.begin(), k.end(), q) - k.begin()) - 1;
    }
  }
}

const std::vector<Key>& StaticSearch::keys() const {
  switch (impl_.index()) {
    case 1: return std::get<1>(impl_).keys();
    case 2: return std::get<2>(impl_).keys();
    default: return std::get<0>(impl_);
  }
}

std::size_t StaticSearch::size() const { return keys().size(); }

std::size_t StaticSearch::words() const {
  switch (impl_.index()) {
    case 1: return std::get<1>(impl_).words();
    case 2: return std::get<2>(impl_).words();
    default: return std::get<0>(impl_).size() + 1;
  }
}

}  // namespace xset
