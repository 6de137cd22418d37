#include "xset/counters.hpp"

#include <random>

namespace xset {

int CounterQueue::new_bucket(std::uint64_t v, int after) {
  int b;
  if (!free_buckets_.empty()) {
    b = free_buckets_.back();
    free_buckets_.pop_back();
    buckets_[b] = Bucket{};
  } else {
    b = static_cast<int>(buckets_.size());
    buckets_.emplace_back();
  }
  buckets_[b].value = v;
  buckets_[b].prev = after;
  buckets_[b].next = after < 0 ? head_ : buckets_[after].next;
  if (buckets_[b].next >= 0)
    buckets_[buckets_[b].next].prev = b;
  else
    tail_ = b;
  if (after >= 0)
    buckets_[after].next = b;
  else
    head_ = b;
  return b;
}

void CounterQueue::attach(int id, int b) {
  Slot& s = ids_[id];
  s.bucket = b;
  s.prev = -1;
  s.next = buckets_[b].first;
  if (s.next >= 0) ids_[s.next].prev = id;
  buckets_[b].first = id;
  ++buckets_[b].size;
}

void CounterQueue::detach(int id) {
  Slot& s = ids_[id];
  Bucket& b = buckets_[s.bucket];
  if (s.prev >= 0)
    ids_[s.prev].next = s.next;
  else
    b.first = s.next;
  if (s.next >= 0) ids_[s.next].prev = s.prev;
  if (--b.size == 0) {
    int bi = s.bucket;
    if (b.prev >= 0)
      buckets_[b.prev].next = b.next;
    else
      head_ = b.next;
    if (b.next >= 0)
      buckets_[b.next].prev = b.prev;
    else
      tail_ = b.prev;
    free_buckets_.push_back(bi);
  }
  s = Slot{};
}

void CounterQueue::add(int id) {
  if (id < 0) throw ContractViolation("counter ids are non-negative");
  if (static_cast<std::size_t>(id) >= ids_.size()) ids_.resize(std::size_t(id) + 1);
  if (ids_[id].bucket >= 0) throw ContractViolation("counter registered twice");
  int b = (head_ >= 0 && buckets_[head_].value == 0) ? head_ : new_bucket(0, -1);
  attach(id, b);
  ++count_;
}

void CounterQueue::remove(int id) {
  if (!contains(id)) throw ContractViolation("removing an unknown counter");
  detach(id);
  --count_;
}

void CounterQueue::increment(int id) {
  if (!contains(id)) throw ContractViolation("incrementing an unknown counter");
  int b = ids_[id].bucket;
  std::uint64_t v = buckets_[b].value + 1;
  int nb = buckets_[b].next;
  if (nb < 0 || buckets_[nb].value != v) {
    nb = new_bucket(v, b);
  }
  detach(id);  // may free b, but nb is already linked after it
  attach(id, nb);
}

int CounterQueue::pick_and_subtract(std::uint64_t q) {
  int id = max_id();
  if (id == kNone) return kNone;
  int b = ids_[id].bucket;
  std::uint64_t v = buckets_[b].value;
  std::uint64_t nv = v > q ? v - q : 0;
  if (nv == v) return id;
  // walk down the value list to the insertion point
  int at = buckets_[b].prev;
  while (at >= 0 && buckets_[at].value > nv) at = buckets_[at].prev;
  int target = (at >= 0 && buckets_[at].value == nv) ? at : new_bucket(nv, at);
  detach(id);
  attach(id, target);
  return id;
}

bool CounterQueue::check() const {
  std::size_t seen = 0;
  int prev = -1;
  for (int b = head_; b >= 0; b = buckets_[b].next) {
    if (buckets_[b].prev != prev) return false;
    if (prev >= 0 && buckets_[prev].value >= buckets_[b].value) return false;
    int n = 0;
    for (int i = buckets_[b].first; i >= 0; i = ids_[i].next) {
      if (ids_[i].bucket != b) return false;
      ++n;
    }
    if (n == 0 || n != buckets_[b].size) return false;
    seen += std::size_t(n);
    prev = b;
  }
  return prev == tail_ && seen == count_;
}

CounterAdversary parse_counter_adversary(const std::string& name) {
  if (name == "round-robin" || name == "round_robin") return CounterAdversary::round_robin;
  if (name == "single-target" || name == "single_target") return CounterAdversary::single_target;
  if (name == "random") return CounterAdversary::random;
  throw ConfigError("unknown counter adversary: " + name);
}

std::string counter_adversary_name(CounterAdversary a) {
  switch (a) {
    case CounterAdversary::round_robin: return "round-robin";
    case CounterAdversary::single_target: return "single-target";
    case CounterAdversary::random: return "random";
  }
  return "?";
}

CounterStats counter_game(std::uint64_t p, std::uint64_t q, CounterAdversary adv, std::uint64_t rounds,
                          std::uint64_t seed) {
  if (p == 0 || q == 0) throw ConfigError("counter game needs p, q >= 1");
  CounterQueue cq;
  for (std::uint64_t i = 0; i < p; ++i) cq.add(static_cast<int>(i));
  std::mt19937_64 rng(seed);
  CounterStats st{p, q, rounds, 0, 2 * q * (floor_log2(p) + 1)};
  std::uint64_t rr = 0;
  for (std::uint64_t r = 0; r < rounds; ++r) {
    for (std::uint64_t j = 0; j < q; ++j) {
      int id;
      switch (adv) {
        case CounterAdversary::round_robin: id = static_cast<int>(rr++ % p); break;
        case CounterAdversary::single_target: id = 0; break;
        default: id = static_cast<int>(rng() % p);
      }
      cq.increment(id);
      if (cq.max_value() > st.max_counter) st.max_counter = cq.max_value();
    }
    cq.pick_and_subtract(q);
  }
  return st;
}

}  // namespace xset
