#include "xset/ordered_set.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "ordered_set_internal.hpp"

namespace xset {

OrderedSet::OrderedSet(const Config& cfg) : cfg_(cfg), table_(cfg.k, cfg.alpha, cfg.finger_mode) {
  if (cfg_.word_bits == 0 || cfg_.word_bits > 64) throw ConfigError("word_bits must be in [1, 64]");
  if (cfg_.finger_mode && cfg_.local_steps < 840) throw ConfigError("local_steps must be at least 840");
  if (cfg_.capacity < 2) throw ConfigError("capacity must be at least 2");
  elems_.emplace_back();  // sentinel
  hook_steps_.assign(table_.levels() + 2, 0);

  if (cfg_.finger_mode) {
    const double logn = std::log2(static_cast<double>(cfg_.capacity));
    const double a_lim = std::sqrt(logn);
    const double b_lim = std::pow(logn, std::log2(std::max(2.0, logn)));
    unsigned a = 0, b = 0;
    for (unsigned i = 1; i < table_.levels(); ++i) {
      if (static_cast<double>(table_.capacity(i)) <= a_lim) a = i;
      if (static_cast<double>(table_.capacity(i)) <= b_lim) b = i;
    }
    if (cfg_.marking_levels >= 0) a = static_cast<unsigned>(cfg_.marking_levels);
    band_a_ = a;
    band_b_ = std::max(a, b);
    const unsigned h = table_.height_for(cfg_.capacity);
    q_ = h > band_a_ ? h - band_a_ : 1;
  }

  root_ = new_node(1);
  rebuild(root_);
  N(root_).countdown = period(1);
  if (cfg_.finger_mode && band_a_ == 0) counter_register(root_);
}

OrderedSet::~OrderedSet() { tearing_down_ = true; }

// ---- pools ----

OrderedSet::NodeId OrderedSet::new_node(int level) {
  NodeId id;
  if (!free_nodes_.empty()) {
    id = free_nodes_.back();
    free_nodes_.pop_back();
    N(id) = Node{};
  } else {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
  }
  N(id).level = level;
  N(id).countdown = period(level);
  return id;
}

void OrderedSet::release_node_ref(std::int32_t id) {
  if (tearing_down_) return;
  Node& x = N(id);
  if (x.refs > 0) --x.refs;
  if (x.refs == 0 && x.dead) to_free_.push_back(id);
}

void OrderedSet::maybe_free(NodeId id) {
  Node& x = N(id);
  if (x.freed || !x.dead || x.refs > 0) return;
  if (x.st == NState::busy) return;
  x.freed = true;
  NodeId fwd = x.forward, abs = x.absorbed;
  x.forward = x.absorbed = kNil;
  // dropping S-structures releases child refs and may queue more frees
  auto s = std::move(x.s);
  auto f = std::move(x.fallback);
  s.reset();
  f.reset();
  if (fwd != kNil) release_node_ref(fwd);
  if (abs != kNil) release_node_ref(abs);
  free_nodes_.push_back(id);
}

void OrderedSet::drain_frees() {
  while (!to_free_.empty()) {
    NodeId id = to_free_.back();
    to_free_.pop_back();
    maybe_free(id);
  }
}

std::uint32_t OrderedSet::new_element() {
  std::uint32_t e;
  if (!free_elems_.empty()) {
    e = free_elems_.back();
    free_elems_.pop_back();
  } else {
    e = static_cast<std::uint32_t>(elems_.size());
    elems_.emplace_back();
  }
  elems_[e].live = true;
  return e;
}

bool OrderedSet::valid(Handle h) const {
  return h.idx > 0 && h.idx < elems_.size() && elems_[h.idx].live && elems_[h.idx].gen == h.gen;
}

void OrderedSet::check_handle(Handle h) const {
  if (!valid(h)) throw ContractViolation("stale or invalid handle");
}

const OrderedSet::Element& OrderedSet::E(Handle h) const {
  check_handle(h);
  return elems_[h.idx];
}

Key OrderedSet::key(Handle h) const { return E(h).key; }
std::uint64_t OrderedSet::payload(Handle h) const { return E(h).payload; }
void OrderedSet::set_payload(Handle h, std::uint64_t payload) {
  check_handle(h);
  elems_[h.idx].payload = payload;
}
unsigned OrderedSet::height() const { return static_cast<unsigned>(N(root_).level); }

// ---- navigation ----

OrderedSet::NodeId OrderedSet::resolve(NodeId x) const {
  while (x != kNil && N(x).dead && N(x).forward != kNil) x = N(x).forward;
  return x;
}

OrderedSet::NodeId OrderedSet::parent(NodeId x) const {
  NodeId p = N(x).parent;
  if (p == kNil) return kNil;
  p = resolve(p);
  const Node& P = N(p);
  if (P.redirect_ticket >= 0) {
    const Ticket& t = tickets_[static_cast<std::size_t>(P.redirect_ticket)];
    if (t.split && t.redirect_from == p && N(x).splitter >= N(t.redirect_to).splitter) return t.redirect_to;
  }
  return p;
}

bool OrderedSet::is_first_child(NodeId x) const {
  NodeId p = parent(x);
  return p == kNil || N(p).first_child == x;
}

bool OrderedSet::is_last_child(NodeId x) const {
  NodeId p = parent(x);
  return p == kNil || N(p).last_child == x;
}

const OrderedSet::SStruct* OrderedSet::authoritative(NodeId x, Key k) const {
  const Node& X = N(x);
  if (X.absorbed != kNil && k >= N(X.absorbed).splitter && N(X.absorbed).s) return N(X.absorbed).s.get();
  if (X.s) return X.s.get();
  return X.fallback.get();
}

OrderedSet::NodeId OrderedSet::route(NodeId x, Key k, OpCounters& oc) const {
  const SStruct* S = authoritative(x, k);
  NodeId c = N(x).first_child;
  if (S && !S->child.empty()) {
    unsigned p = 0;
    std::int64_t j = S->search.pred(k, &p);
    oc.probes += p;
    if (j >= 0) c = S->child[static_cast<std::size_t>(j)];
  }
  unsigned hops = 0;
  while (N(c).dead && N(c).forward != kNil) {
    c = N(c).forward;
    ++hops;
  }
  if (N(c).dead) c = N(x).first_child;  // deleted while it was the only leaf
  // a leaf whose splitter moved up since the build
  while (N(c).splitter > k && N(c).prev != kNil) {
    c = N(c).prev;
    ++hops;
  }
  while (N(c).next != kNil && N(N(c).next).splitter <= k) {
    c = N(c).next;
    ++hops;
  }
  oc.hops += hops;
  return c;
}

OrderedSet::NodeId OrderedSet::descend(NodeId from, Key k, OpCounters& oc) const {
  NodeId x = from;
  ++oc.visits;
  while (N(x).level > 0) {
    x = route(x, k, oc);
    ++oc.visits;
  }
  return x;
}

std::optional<Handle> OrderedSet::answer_from_leaf(NodeId leaf, Key k) const {
  const Node& L = N(leaf);
  if (L.key <= k) return handle_of(L.elem_last);
  std::uint32_t p = elems_[L.elem_first].prev;
  if (p == 0) return std::nullopt;
  return handle_of(p);
}

std::optional<Handle> OrderedSet::search(Key k) const {
  op_ = OpCounters{};
  if (elements_ == 0) return std::nullopt;
  NodeId leaf = descend(root_, k, op_);
  stats_.max_hops = std::max<std::uint64_t>(stats_.max_hops, op_.hops);
  return answer_from_leaf(leaf, k);
}

std::optional<Handle> OrderedSet::lookup(Key k) const {
  auto h = search(k);
  if (h && elems_[h->idx].key == k) return h;
  return std::nullopt;
}

std::optional<Handle> OrderedSet::minimum() const {
  if (elements_ == 0) return std::nullopt;
  return handle_of(elems_[0].next);
}

std::optional<Handle> OrderedSet::maximum() const {
  if (elements_ == 0) return std::nullopt;
  return handle_of(elems_[0].prev);
}

std::optional<Handle> OrderedSet::predecessor(Handle h) const {
  std::uint32_t p = E(h).prev;
  if (p == 0) return std::nullopt;
  return handle_of(p);
}

std::optional<Handle> OrderedSet::successor(Handle h) const {
  std::uint32_t n = E(h).next;
  if (n == 0) return std::nullopt;
  return handle_of(n);
}

// ---- static structures ----

std::uint64_t OrderedSet::budget(int level) const {
  const std::uint64_t n = table_.capacity(static_cast<unsigned>(level));
  if (!cfg_.finger_mode) return ceil_div(n, 84);
  std::uint64_t b = ceil_sqrt(n);
  // marking-band levels also owe n_i / 2^i walk steps
  if (static_cast<unsigned>(level) <= std::max(1u, band_a_) && level < 63)
    b = std::max(b, ceil_div(n, std::uint64_t{1} << level));
  return b;
}

std::uint32_t OrderedSet::period(int level) const {
  if (level <= 1) return 1;
  std::uint64_t p;
  if (cfg_.finger_mode)
    p = budget(level - 1) / 2;
  else
    p = ceil_div(table_.capacity(static_cast<unsigned>(level - 1)), 168);
  return static_cast<std::uint32_t>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(p, 1u << 30)));
}

bool OrderedSet::fresh(NodeId x, std::uint64_t since) const {
  if (x == kNil) return true;
  return N(x).swap_time > since;
}

void OrderedSet::rebuild(NodeId x) {
  Node& X = N(x);
  if (X.level == 0) return;
  if (X.s && X.built_version == X.child_version) {
    ++stats_.rebuild_skips;
  } else {
    ++stats_.rebuilds;
    std::vector<Key> keys;
    std::vector<NodeId> ids;
    keys.reserve(X.nchildren);
    ids.reserve(X.nchildren);
    if (X.first_child != kNil) {
      for (NodeId c = X.first_child;; c = N(c).next) {
        keys.push_back(N(c).splitter);
        ids.push_back(c);
        if (c == X.last_child) break;
      }
    }
    auto s = std::make_shared<SStruct>();
    s->search = StaticSearch(std::move(keys), cfg_.sstruct, cfg_.word_bits);
    for (NodeId c : ids) ++N(c).refs;
    s->child = std::move(ids);
    s->owner = this;
    Node& Y = N(x);
    Y.s = std::move(s);
    Y.built_version = Y.child_version;
  }
  N(x).pending = 0;
  Node& Y = N(x);
  Y.swap_time = ++clock_;
  if (Y.absorbed != kNil) {
    NodeId a = Y.absorbed;
    Y.absorbed = kNil;
    release_node_ref(a);
  }
  if (Y.fallback) Y.fallback.reset();
}

void OrderedSet::advance_countdown(NodeId x) {
  if (x == kNil || N(x).dead) return;
  Node& X = N(x);
  if (X.level <= 1) {
    if (X.built_version != X.child_version || !X.s) rebuild(x);
    return;
  }
  if (X.countdown > 1) {
    --X.countdown;
    return;
  }
  rebuild(x);
  N(x).countdown = period(N(x).level);
}

// ---- leaf surgery ----

void OrderedSet::link_leaf_after(NodeId pid, NodeId after, NodeId leaf) {
  Node& L = N(leaf);
  L.prev = after;
  L.next = after == kNil ? leaf_head_ : N(after).next;
  if (L.next != kNil) N(L.next).prev = leaf;
  if (after == kNil)
    leaf_head_ = leaf;
  else
    N(after).next = leaf;
  L.parent = pid;
  Node& P = N(pid);
  if (P.nchildren == 0) {
    P.first_child = P.last_child = leaf;
  } else if (L.next == P.first_child) {
    P.first_child = leaf;
  } else if (L.prev == P.last_child) {
    P.last_child = leaf;
  }
  ++P.nchildren;
  ++P.child_version;
  if (P.cut == kNil || P.cut == leaf) {
    cut_restart(pid);
  } else if (N(leaf).splitter < N(P.cut).splitter) {
    ++P.prefix_w;
    ++P.prefix_cnt;
  }
  ++leaves_;
}

void OrderedSet::unlink_leaf(NodeId leaf) {
  const NodeId pid = parent(leaf);
  Node& P = N(pid);
  Node& L = N(leaf);
  if (P.cut == leaf) {
    if (leaf != P.last_child) {
      P.cut = L.next;
    } else if (leaf != P.first_child) {
      P.cut = L.prev;
      --P.prefix_w;
      --P.prefix_cnt;
    } else {
      P.cut = kNil;
      P.prefix_w = 0;
      P.prefix_cnt = 0;
    }
  } else if (P.cut != kNil && L.splitter < N(P.cut).splitter) {
    --P.prefix_w;
    --P.prefix_cnt;
  }
  if (P.nchildren == 1) {
    P.first_child = P.last_child = kNil;
  } else {
    if (P.first_child == leaf) {
      N(L.next).splitter = L.splitter;
      P.first_child = L.next;
    }
    if (P.last_child == leaf) P.last_child = L.prev;
  }
  if (L.prev != kNil) N(L.prev).next = L.next;
  if (L.next != kNil) N(L.next).prev = L.prev;
  if (leaf_head_ == leaf) leaf_head_ = L.next;
  // stale level-1 structures may still route here
  L.forward = L.prev != kNil ? L.prev : L.next;
  if (L.forward != kNil) ++N(L.forward).refs;
  --P.nchildren;
  ++P.child_version;
  L.dead = true;
  to_free_.push_back(leaf);
  --leaves_;
}

// ---- updates ----

Handle OrderedSet::insert(Key k, std::uint64_t payload) {
  if (k > low_mask(cfg_.word_bits) || k > cfg_.universe_bound) throw ContractViolation("key outside the universe");
  auto h = search(k);
  OpCounters descent = op_;
  Handle r = finger_insert(h, k, payload);
  op_.visits = descent.visits;
  op_.probes = descent.probes;
  op_.hops = descent.hops;
  return r;
}

bool OrderedSet::delete_key(Key k) {
  auto h = lookup(k);
  if (!h) return false;
  OpCounters descent = op_;
  finger_delete(*h);
  op_.visits = descent.visits;
  op_.probes = descent.probes;
  op_.hops = descent.hops;
  return true;
}

Handle OrderedSet::finger_insert(std::optional<Handle> after, Key k, std::uint64_t payload) {
  if (k > low_mask(cfg_.word_bits) || k > cfg_.universe_bound) throw ContractViolation("key outside the universe");
  std::uint32_t a = 0;
  if (after) {
    check_handle(*after);
    a = after->idx;
    if (elems_[a].key > k) throw ContractViolation("finger insert out of order");
  }
  std::uint32_t succ = elems_[a].next;
  if (succ != 0 && elems_[succ].key < k) throw ContractViolation("finger insert out of order");
  op_ = OpCounters{};

  // equal keys share a leaf; the newest goes last in its bucket
  NodeId dup = kNil;
  if (a != 0 && elems_[a].key == k)
    dup = elems_[a].leaf;
  else if (succ != 0 && elems_[succ].key == k)
    dup = elems_[succ].leaf;

  std::uint32_t e = new_element();
  Element& El = elems_[e];
  El.key = k;
  El.payload = payload;
  ++elements_;

  auto link_elem_after = [&](std::uint32_t pos) {
    elems_[e].prev = pos;
    elems_[e].next = elems_[pos].next;
    elems_[elems_[pos].next].prev = e;
    elems_[pos].next = e;
  };

  if (dup != kNil) {
    Node& L = N(dup);
    link_elem_after(L.elem_last);
    L.elem_last = e;
    ++L.elem_count;
    elems_[e].leaf = dup;
    return handle_of(e);
  }

  link_elem_after(a);
  const NodeId leaf = new_node(0);
  Node& L = N(leaf);
  L.key = k;
  L.weight = 1;
  L.elem_first = L.elem_last = e;
  L.elem_count = 1;
  elems_[e].leaf = leaf;

  const NodeId v = a != 0 ? elems_[a].leaf : kNil;
  const NodeId v2 = v != kNil ? N(v).next : leaf_head_;
  NodeId pid;
  if (v2 == kNil || k < N(v2).splitter) {
    pid = v == kNil ? root_ : parent(v);
    N(leaf).splitter = v == kNil ? 0 : k;
    link_leaf_after(pid, v, leaf);
  } else {
    pid = parent(v2);
    N(leaf).splitter = N(v2).splitter;
    N(v2).splitter = N(v2).key;
    link_leaf_after(pid, N(v2).prev, leaf);
  }
  hook(pid, leaf, +1);
  drain_frees();
  return handle_of(e);
}

void OrderedSet::finger_delete(Handle h) {
  check_handle(h);
  op_ = OpCounters{};
  const std::uint32_t e = h.idx;
  Element& El = elems_[e];
  const NodeId leaf = El.leaf;
  elems_[El.prev].next = El.next;
  elems_[El.next].prev = El.prev;
  El.live = false;
  ++El.gen;
  El.leaf = kNil;
  free_elems_.push_back(e);
  --elements_;

  Node& L = N(leaf);
  if (L.elem_count > 1) {
    if (L.elem_first == e) L.elem_first = elems_[e].next;
    if (L.elem_last == e) L.elem_last = elems_[e].prev;
    --L.elem_count;
    return;
  }
  const NodeId pid = parent(leaf);
  unlink_leaf(leaf);
  hook(pid, leaf, -1);
  drain_frees();
}

// ---- doubles ----

Key orderable_bits(double f) {
  if (std::isnan(f)) throw DomainError("NaN has no order");
  if (f == 0.0) f = 0.0;  // fold -0.0
  Key b = std::bit_cast<Key>(f);
  return (b >> 63) ? ~b : (b | (Key{1} << 63));
}

}  // namespace xset
