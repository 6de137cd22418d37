#pragma once

#include "xset/ordered_set.hpp"

namespace xset {

// Immutable static structure over one node's children. Holding one counts as a
// reference on every child so absorbed children stay addressable.
struct OrderedSet::SStruct {
  StaticSearch search;
  std::vector<NodeId> child;
  OrderedSet* owner = nullptr;

  SStruct() = default;
  SStruct(const SStruct&) = delete;
  SStruct& operator=(const SStruct&) = delete;
  ~SStruct() {
    if (owner)
      for (NodeId c : child) owner->release_node_ref(c);
  }
};

}  // namespace xset
