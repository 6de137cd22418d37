#include <algorithm>

#include "ordered_set_internal.hpp"

namespace xset {

void OrderedSet::touch(NodeId x) {
  if (cfg_.finger_mode && x != kNil) touched_.push_back(x);
}

void OrderedSet::counter_register(NodeId x) {
  if (cfg_.finger_mode && !counters_.contains(x)) counters_.add(x);
}

void OrderedSet::counter_unregister(NodeId x) {
  if (counters_.contains(x)) counters_.remove(x);
}

void OrderedSet::set_ascent(NodeId at) {
  const NodeId old = ascent_.at;
  ascent_.at = at;
  if (at != kNil) ++N(at).refs;
  if (old != kNil) release_node_ref(old);
}

void OrderedSet::finger_schedule(const std::vector<NodeId>& path) {
  touched_.clear();
  const std::size_t a = band_a_;
  // the exact-weight path above the counter base is instrumentation only
  for (std::size_t j = 0; j < path.size() && j <= a; ++j) touch(path[j]);

  auto work = [&](NodeId x, std::uint64_t steps) {
    for (std::uint64_t s = 0; s < steps; ++s) {
      if (N(x).dead || N(x).st == NState::free || N(x).ticket < 0) return;
      step(N(x).ticket);
    }
  };

  // level 1: a fixed burst of direct steps
  const NodeId x1 = path[0];
  work(x1, 84);
  checks_.push_back(x1);

  // marking band: the C placement walks form a counter whose top bit sticks
  const std::size_t top = std::min(a, path.size());
  if (top >= 1) {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < top; ++j)
      if (N(path[j]).marked) bits |= std::uint64_t{1} << j;
    const std::uint64_t c = cfg_.local_steps, end = bits + c;
    auto f = [&](std::size_t e) { return (end >> e) - (bits >> e); };
    for (std::size_t j = 0; j < top; ++j) {
      const std::uint64_t cnt = j + 1 < top ? f(j) - f(j + 1) : f(j);
      if (cnt) work(path[j], cnt);
      checks_.push_back(path[j]);
    }
    const std::uint64_t half = std::uint64_t{1} << (top - 1);
    const bool top_bit = end >= half || (bits & half);
    const std::uint64_t low = end % half;
    for (std::size_t j = 0; j < top; ++j) {
      if (N(path[j]).dead) continue;
      N(path[j]).marked = j + 1 == top ? top_bit : ((low >> j) & 1) != 0;
    }
  }

  // counter band
  auto ascend_one = [&]() {
    NodeId at = resolve(ascent_.at);
    const NodeId p = at == kNil ? kNil : parent(at);
    if (p == kNil) {
      set_ascent(kNil);
      ascent_.active = false;
      return;
    }
    touch(p);
    N(p).approx += ascent_.delta;
    charge(p, -1);
    checks_.push_back(p);
    set_ascent(p);
  };
  if (path.size() > a) {
    const NodeId y = path[a];
    if (!N(y).dead) {
      counter_register(y);
      counters_.increment(y);
    }
  }
  if (ascent_.active) ascend_one();
  if (++updates_since_pick_ >= q_) {
    for (unsigned guard = 0; ascent_.active && guard < 256; ++guard) ascend_one();
    const int v = counters_.max_id();
    if (v != CounterQueue::kNone) {
      stats_.max_counter = std::max<std::uint64_t>(stats_.max_counter, counters_.value(v));
      counters_.pick_and_subtract(q_);
      Node& V = N(v);
      ascent_.delta = V.weight - V.prop;
      V.prop = V.weight;
      ascent_.active = true;
      set_ascent(v);
      touch(v);
      checks_.push_back(v);
      ++stats_.counter_picks;
    }
    updates_since_pick_ = 0;
  }
  drain_checks();

  std::sort(touched_.begin(), touched_.end());
  touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
  op_.nodes_touched = static_cast<unsigned>(touched_.size());
  stats_.max_nodes_touched = std::max<std::uint64_t>(stats_.max_nodes_touched, touched_.size());
}

std::optional<Handle> OrderedSet::finger_search(Handle f, Key y) const {
  check_handle(f);
  op_ = OpCounters{};
  ++stats_.finger_searches;
  NodeId cur = elems_[f.idx].leaf;
  const Key k = elems_[f.idx].key;
  NodeId found = kNil;
  if (y >= k) {
    // ascend until the node or its right neighbor covers y
    for (;;) {
      const NodeId nx = N(cur).next;
      if (nx == kNil || y < N(nx).splitter) {
        found = cur;
        break;
      }
      const NodeId nnx = N(nx).next;
      if (nnx == kNil || y < N(nnx).splitter) {
        found = nx;
        ++stats_.finger_neighbor_hits;
        break;
      }
      const NodeId p = parent(cur);
      if (p == kNil) {
        found = cur;
        break;
      }
      cur = p;
    }
  } else {
    for (;;) {
      if (N(cur).splitter <= y) {
        found = cur;
        break;
      }
      const NodeId pv = N(cur).prev;
      if (pv != kNil && N(pv).splitter <= y) {
        found = pv;
        ++stats_.finger_neighbor_hits;
        break;
      }
      const NodeId p = parent(cur);
      if (p == kNil) {
        found = cur;
        break;
      }
      cur = p;
    }
  }
  op_.peak_level = static_cast<unsigned>(N(found).level);
  if (op_.peak_level > 1) ++stats_.finger_ascents_above_1;
  NodeId leaf = descend(found, y, op_);
  return answer_from_leaf(leaf, y);
}

}  // namespace xset
