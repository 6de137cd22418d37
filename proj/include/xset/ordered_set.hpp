#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xset/common.hpp"
#include "xset/counters.hpp"
#include "xset/level_table.hpp"
#include "xset/static_search.hpp"

namespace xset {

struct Config {
  unsigned k = 2;              // recursion exponent
  double alpha = 0.0;          // <= 0 picks the default base for k
  unsigned word_bits = 64;     // keys must fit in this many bits
  Key universe_bound = kKeyMax;
  bool finger_mode = false;    // constant-work finger updates
  unsigned local_steps = 1000; // C, placement walks per finger update
  SVariant sstruct = SVariant::automatic;
  /// Finger mode: n used to fix the band boundaries and the counter period.
  std::uint64_t capacity = std::uint64_t{1} << 20;
  /// Finger mode: override for the top level of the marking band (-1 derives it from capacity).
  int marking_levels = -1;
};

/// Reference to a stored element. Stale once the element is deleted.
struct Handle {
  std::uint32_t idx = 0;
  std::uint32_t gen = 0;
  bool operator==(const Handle&) const = default;
};

/// Per-operation instrumentation, refreshed by every search and update.
struct OpCounters {
  unsigned visits = 0;         // nodes on the descent path, root and leaf included
  unsigned probes = 0;         // static structure probes on the descent
  unsigned hops = 0;           // forward pointer and right-walk corrections
  unsigned peak_level = 0;     // finger search: level where the ascent stopped
  unsigned nodes_touched = 0;  // finger mode: distinct nodes the schedule touched
  unsigned steps_by_level_max = 0;  // most hook-charged ticket steps at any one level
};

struct SetStats {
  std::uint64_t joins = 0, splits = 0, ties = 0;
  std::uint64_t tickets_completed = 0;
  std::uint64_t budget_violations = 0;  // completed with fewer steps than budget
  std::uint64_t min_slack = ~std::uint64_t{0};  // min over completions of steps - budget
  std::uint64_t root_grows = 0, root_shrinks = 0;
  std::uint64_t rebuilds = 0, rebuild_skips = 0;
  std::uint64_t max_hops = 0;
  std::uint64_t step_level_violations = 0;  // a hook charged two steps at one level
  std::uint64_t max_nodes_touched = 0;
  std::uint64_t max_split_imbalance = 0;    // worst |left - right| at a split, in units of n_i/12 * 1000
  std::uint64_t split_imbalance_violations = 0;
  std::uint64_t protocol_faults = 0;        // rule (c) with no neighbor
  std::uint64_t finger_searches = 0, finger_ascents_above_1 = 0;
  std::uint64_t finger_neighbor_hits = 0;  // ascent stopped on a level-list neighbor
  std::uint64_t counter_picks = 0;
  std::uint64_t max_counter = 0;
};

struct AuditReport {
  std::vector<std::string> violations;
  std::uint64_t nodes = 0, elements = 0, leaves = 0;
  unsigned height = 0;
  std::uint64_t max_approx_error = 0;  // finger mode, in units of n_i/8 * 1000
  bool ok() const { return violations.empty(); }
};

class OrderedSet {
 public:
  explicit OrderedSet(const Config& cfg = Config{});
  ~OrderedSet();
  OrderedSet(const OrderedSet&) = delete;
  OrderedSet& operator=(const OrderedSet&) = delete;

  // queries
  std::optional<Handle> search(Key k) const;
  std::optional<Handle> lookup(Key k) const;
  std::optional<Handle> minimum() const;
  std::optional<Handle> maximum() const;
  std::optional<Handle> predecessor(Handle h) const;
  std::optional<Handle> successor(Handle h) const;
  Key key(Handle h) const;
  std::uint64_t payload(Handle h) const;
  void set_payload(Handle h, std::uint64_t payload);
  bool valid(Handle h) const;
  /// Largest element <= y, starting from a finger.
  std::optional<Handle> finger_search(Handle f, Key y) const;

  // updates
  Handle insert(Key k, std::uint64_t payload = 0);
  bool delete_key(Key k);
  /// after = nullopt inserts at the front.
  Handle finger_insert(std::optional<Handle> after, Key k, std::uint64_t payload = 0);
  void finger_delete(Handle h);

  // introspection
  std::size_t size() const { return elements_; }
  std::size_t leaf_count() const { return leaves_; }
  unsigned height() const;
  const LevelTable& levels() const { return table_; }
  const Config& config() const { return cfg_; }
  std::uint64_t space_usage() const;
  AuditReport audit() const;
  const OpCounters& last_op() const { return op_; }
  const SetStats& stats() const { return stats_; }
  /// Finger mode band boundaries and counter period.
  unsigned marking_top() const { return band_a_; }
  unsigned band_b() const { return band_b_; }
  unsigned counter_period() const { return q_; }

  /// Hooks for S-structures releasing their child references.
  void release_node_ref(std::int32_t id);

 private:
  using NodeId = std::int32_t;
  using TicketId = std::int32_t;
  static constexpr NodeId kNil = -1;
  enum class NState : std::uint8_t { free, busy, tied };

  struct SStruct;

  struct Node {
    int level = 0;
    Key splitter = 0;
    NodeId prev = kNil, next = kNil;  // level list
    NodeId parent = kNil;             // raw pointer, resolved by parent()
    NodeId first_child = kNil, last_child = kNil;
    std::uint32_t nchildren = 0;
    std::int64_t weight = 0;  // exact leaf count below
    std::int64_t approx = 0;  // finger mode estimate for counter band levels
    std::int64_t prop = 0;    // finger mode: weight last propagated up (counter band base)
    NState st = NState::free;
    TicketId ticket = -1;     // busy: own ticket; tied: ticket tied to
    bool dead = false;
    NodeId forward = kNil;
    std::uint32_t refs = 0;
    // static structure
    std::shared_ptr<const SStruct> s, fallback;
    std::uint64_t swap_time = 0;
    std::uint32_t countdown = 1;
    std::uint64_t child_version = 1, built_version = 0;
    std::uint32_t pending = 0;  // level 1: leaf changes since the last build
    NodeId absorbed = kNil;   // node absorbed by a join whose S is still in use
    // cut child
    NodeId cut = kNil;
    std::int64_t prefix_w = 0;
    std::uint32_t prefix_cnt = 0;
    bool settling = false;
    // leaves
    Key key = 0;
    std::uint32_t elem_first = 0, elem_last = 0, elem_count = 0;
    // finger mode marking bit
    bool marked = false;
    bool freed = false;
    std::int32_t redirect_ticket = -1;  // ticket moving this node's children elsewhere
  };

  struct Ticket {
    bool split = false;
    bool done = true;
    int level = 0;
    NodeId u = kNil, v = kNil;  // join: u absorbed v; split: u cut into u, v
    std::uint64_t steps = 0, budget = 0, open_time = 0;
    NodeId ties[2] = {kNil, kNil};
    NodeId redirect = kNil;     // next child whose parent pointer is redirected
    NodeId redirect_from = kNil, redirect_to = kNil;
  };

  struct Element {
    Key key = 0;
    std::uint64_t payload = 0;
    std::uint32_t prev = 0, next = 0;  // global sorted list, 0 is the sentinel
    NodeId leaf = kNil;
    std::uint32_t gen = 1;
    bool live = false;
  };

  struct Ascent {
    bool active = false;
    NodeId at = kNil;
    std::int64_t delta = 0;
  };

  // nodes and elements
  NodeId new_node(int level);
  Node& N(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& N(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  void maybe_free(NodeId id);
  void drain_frees();
  std::uint32_t new_element();
  const Element& E(Handle h) const;
  void check_handle(Handle h) const;
  Handle handle_of(std::uint32_t e) const { return Handle{e, elems_[e].gen}; }

  // navigation
  NodeId parent(NodeId x) const;
  NodeId resolve(NodeId x) const;
  const SStruct* authoritative(NodeId x, Key k) const;
  NodeId route(NodeId x, Key k, OpCounters& oc) const;
  NodeId descend(NodeId from, Key k, OpCounters& oc) const;
  std::optional<Handle> answer_from_leaf(NodeId leaf, Key k) const;
  bool is_first_child(NodeId x) const;
  bool is_last_child(NodeId x) const;

  // static structures
  void rebuild(NodeId x);
  void advance_countdown(NodeId x);
  std::uint32_t period(int level) const;
  std::uint64_t budget(int level) const;
  bool fresh(NodeId x, std::uint64_t since) const;

  // balance
  void hook(NodeId leaf_parent, NodeId leaf, int dir);
  void standard_schedule(const std::vector<NodeId>& path);
  void finger_schedule(const std::vector<NodeId>& path);
  void charge(NodeId x, int level_slot);
  void step(TicketId t);
  bool try_complete(TicketId t);
  void complete(TicketId t);
  void check(NodeId x);
  void drain_checks();
  std::int64_t decision_weight(const Node& x) const;
  TicketId new_ticket();
  TicketId start_join(NodeId l, NodeId r, NodeId carry_tie = kNil);
  TicketId start_split(NodeId u, const NodeId* carry_ties = nullptr);
  void maybe_collapse_root();
  std::int64_t contribution(NodeId x) const;
  void set_ascent(NodeId at);
  void untie(NodeId x);
  void add_tie(TicketId t, NodeId x);
  bool cuttable_before(NodeId c) const;
  void cut_adjust(NodeId x, unsigned max_moves);
  bool cut_settled(NodeId x) const;
  void cut_on_absorb(NodeId parent_id, NodeId l, NodeId r, std::int64_t l_old_weight, std::uint32_t l_old_cnt);
  void cut_restart(NodeId x);
  std::uint32_t child_bound(int level) const;

  // finger mode
  void counter_register(NodeId x);
  void counter_unregister(NodeId x);
  void touch(NodeId x);

  // leaf list surgery
  NodeId leaf_of(std::uint32_t e) const { return elems_[e].leaf; }
  void link_leaf_after(NodeId parent_id, NodeId after, NodeId leaf);
  void unlink_leaf(NodeId leaf);

  Config cfg_;
  LevelTable table_;
  std::deque<Node> nodes_;
  std::vector<NodeId> free_nodes_;
  std::vector<NodeId> to_free_;
  std::deque<Element> elems_;  // slot 0 is the list sentinel
  std::vector<std::uint32_t> free_elems_;
  std::vector<Ticket> tickets_;
  std::vector<TicketId> free_tickets_;
  std::vector<NodeId> checks_;
  NodeId root_ = kNil;
  NodeId leaf_head_ = kNil;  // first leaf in the level-0 list
  std::size_t elements_ = 0;
  std::size_t leaves_ = 0;
  std::uint64_t clock_ = 1;
  bool tearing_down_ = false;
  // finger mode
  unsigned band_a_ = 0, band_b_ = 0, q_ = 1;
  CounterQueue counters_;
  std::uint64_t updates_since_pick_ = 0;
  Ascent ascent_;
  std::vector<NodeId> touched_;
  std::vector<unsigned> hook_steps_;  // per level, reset each hook
  mutable OpCounters op_;
  mutable SetStats stats_;

  friend struct SStructAccess;
};

/// Order-preserving map from doubles to keys. NaN is a domain error; +0.0 and
/// -0.0 map to the same key.
Key orderable_bits(double f);

}  // namespace xset
