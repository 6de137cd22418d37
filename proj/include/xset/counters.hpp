#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xset/common.hpp"

namespace xset {

/// Counters kept in buckets of equal value; the buckets form a sorted doubly
/// linked list so the largest counter is found in constant time and a +1 moves
/// a counter to the adjacent bucket.
class CounterQueue {
 public:
  static constexpr int kNone = -1;

  /// Registers counter id (ids are dense small integers) with value 0.
  void add(int id);
  void remove(int id);
  bool contains(int id) const { return id >= 0 && static_cast<std::size_t>(id) < ids_.size() && ids_[id].bucket >= 0; }
  void increment(int id);
  /// A counter of maximum value, or kNone when empty.
  int max_id() const { return tail_ < 0 ? kNone : buckets_[tail_].first; }
  std::uint64_t max_value() const { return tail_ < 0 ? 0 : buckets_[tail_].value; }
  std::uint64_t value(int id) const { return buckets_[ids_[id].bucket].value; }
  /// Picks a maximum counter, lowers it by q (to zero if below q) and returns its id.
  int pick_and_subtract(std::uint64_t q);
  std::size_t size() const { return count_; }
  /// Checks bucket ordering and membership links; returns false on corruption.
  bool check() const;

 private:
  struct Bucket {
    std::uint64_t value = 0;
    int prev = -1, next = -1;  // neighbors in value order
    int first = -1;            // first member
    int size = 0;
  };
  struct Slot {
    int bucket = -1;
    int prev = -1, next = -1;  // neighbors inside the bucket
  };
  int new_bucket(std::uint64_t v, int after);
  void detach(int id);
  void attach(int id, int bucket);

  std::vector<Bucket> buckets_;
  std::vector<int> free_buckets_;
  std::vector<Slot> ids_;
  int head_ = -1, tail_ = -1;  // smallest and largest bucket
  std::size_t count_ = 0;
};

enum class CounterAdversary { round_robin, single_target, random };
CounterAdversary parse_counter_adversary(const std::string& name);
std::string counter_adversary_name(CounterAdversary a);

struct CounterStats {
  std::uint64_t p = 0, q = 0, rounds = 0;
  std::uint64_t max_counter = 0;
  std::uint64_t bound = 0;  // 2q(floor(log2 p) + 1)
};

/// Each round: q increments chosen by the adversary, then one pick that
/// subtracts q from a largest counter.
CounterStats counter_game(std::uint64_t p, std::uint64_t q, CounterAdversary adv, std::uint64_t rounds,
                          std::uint64_t seed);

}  // namespace xset
