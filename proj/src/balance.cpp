#include <algorithm>
#include <cstdlib>

#include "ordered_set_internal.hpp"

namespace xset {

namespace {
// leaf changes a level-1 structure absorbs before it is rebuilt
constexpr std::uint32_t kLeafRebuildPeriod = 16;
}  // namespace

// ---- hook and schedule ----

void OrderedSet::hook(NodeId leaf_parent, NodeId leaf, int dir) {
  std::vector<NodeId> path;
  NodeId child = leaf;
  for (NodeId x = leaf_parent; x != kNil; x = parent(x)) {
    Node& X = N(x);
    X.weight += dir;
    if (X.level >= 2 && X.cut != kNil && X.cut != child && N(child).splitter < N(X.cut).splitter)
      X.prefix_w += dir;
    path.push_back(x);
    child = x;
  }
  if (++N(leaf_parent).pending >= kLeafRebuildPeriod) rebuild(leaf_parent);
  for (NodeId x : path) cut_adjust(x, 4);
  if (cfg_.finger_mode)
    finger_schedule(path);
  else
    standard_schedule(path);
}

void OrderedSet::charge(NodeId x, int level_slot) {
  Node& X = N(x);
  if (X.dead || X.ticket < 0 || X.st == NState::free) return;
  if (level_slot >= 0) {
    auto& c = hook_steps_[static_cast<std::size_t>(level_slot)];
    if (++c > 1) ++stats_.step_level_violations;
    op_.steps_by_level_max = std::max(op_.steps_by_level_max, c);
  }
  step(X.ticket);
}

void OrderedSet::standard_schedule(const std::vector<NodeId>& path) {
  std::fill(hook_steps_.begin(), hook_steps_.end(), 0u);
  for (NodeId x : path) {
    if (N(x).dead) continue;
    charge(x, N(x).level);
    checks_.push_back(x);
  }
  drain_checks();
}

// ---- tickets ----

OrderedSet::TicketId OrderedSet::new_ticket() {
  TicketId t;
  if (!free_tickets_.empty()) {
    t = free_tickets_.back();
    free_tickets_.pop_back();
    tickets_[static_cast<std::size_t>(t)] = Ticket{};
  } else {
    t = static_cast<TicketId>(tickets_.size());
    tickets_.emplace_back();
  }
  return t;
}

std::uint32_t OrderedSet::child_bound(int level) const {
  if (level <= 1) return static_cast<std::uint32_t>(table_.capacity(1));
  return static_cast<std::uint32_t>(
      ceil_div(4 * table_.capacity(static_cast<unsigned>(level)), table_.capacity(static_cast<unsigned>(level - 1))) + 4);
}

void OrderedSet::step(TicketId tid) {
  Ticket& t = tickets_[static_cast<std::size_t>(tid)];
  if (t.done) return;
  ++t.steps;
  touch(t.u);
  if (t.split) touch(t.v);

  // move up to 84 parent pointers
  for (unsigned moved = 0; t.redirect != kNil && moved < 84; ++moved) {
    NodeId c = t.redirect;
    if (N(c).dead) {
      t.redirect = N(c).next;
      continue;
    }
    if (N(c).parent != t.redirect_from) {
      t.redirect = kNil;
      break;
    }
    N(c).parent = t.redirect_to;
    t.redirect = N(c).next;
  }
  if (t.redirect != kNil && N(t.redirect).parent != t.redirect_from && !N(t.redirect).dead) t.redirect = kNil;

  const NodeId p = parent(t.u);
  touch(p);
  advance_countdown(p);
  advance_countdown(t.u);
  if (t.split) advance_countdown(t.v);

  const std::uint64_t b = budget(t.level);
  const unsigned moves = static_cast<unsigned>(std::max<std::uint64_t>(4, ceil_div(child_bound(t.level), b)));
  cut_adjust(t.u, moves);
  if (t.split) cut_adjust(t.v, moves);

  try_complete(tid);
}

bool OrderedSet::try_complete(TicketId tid) {
  Ticket& t = tickets_[static_cast<std::size_t>(tid)];
  if (t.done || t.steps < t.budget || t.redirect != kNil) return false;
  if (!fresh(parent(t.u), t.open_time)) return false;
  if (!fresh(t.u, t.open_time)) return false;
  if (t.split && !fresh(t.v, t.open_time)) return false;
  if (!cut_settled(t.u)) return false;
  if (t.split && !cut_settled(t.v)) return false;
  complete(tid);
  return true;
}

void OrderedSet::complete(TicketId tid) {
  Ticket t = tickets_[static_cast<std::size_t>(tid)];
  tickets_[static_cast<std::size_t>(tid)].done = true;
  ++stats_.tickets_completed;
  if (t.steps < t.budget) ++stats_.budget_violations;
  stats_.min_slack = std::min<std::uint64_t>(stats_.min_slack, t.steps - std::min(t.steps, t.budget));

  NodeId ties[2] = {t.ties[0], t.ties[1]};
  for (NodeId y : ties)
    if (y != kNil) {
      N(y).st = NState::free;
      N(y).ticket = -1;
    }

  if (!t.split) {
    const NodeId l = t.u, r = t.v;
    Node& L = N(l);
    L.st = NState::free;
    L.ticket = -1;
    if (L.absorbed != kNil) {
      NodeId a = L.absorbed;
      L.absorbed = kNil;
      release_node_ref(a);
    }
    N(r).redirect_ticket = -1;
    free_tickets_.push_back(tid);
    release_node_ref(r);  // the ticket's hold

    const std::uint64_t b = table_.latency(static_cast<unsigned>(N(l).level));
    const bool root = parent(l) == kNil;
    if (!root && decision_weight(N(l)) >= static_cast<std::int64_t>(58 * b)) {
      start_split(l, ties);
    } else if (!root && (ties[0] != kNil || ties[1] != kNil)) {
      NodeId first = ties[0] != kNil ? ties[0] : ties[1];
      NodeId other = ties[0] != kNil ? ties[1] : kNil;
      if (N(first).next == l)
        start_join(first, l, other);
      else
        start_join(l, first, other);
    } else {
      checks_.push_back(l);
      for (NodeId y : ties)
        if (y != kNil) checks_.push_back(y);
    }
  } else {
    const NodeId u = t.u, v = t.v;
    N(u).st = N(v).st = NState::free;
    N(u).ticket = N(v).ticket = -1;
    N(u).redirect_ticket = -1;
    N(v).fallback.reset();
    free_tickets_.push_back(tid);
    NodeId lt = kNil, rt = kNil;
    for (NodeId y : ties) {
      if (y == kNil) continue;
      if (N(y).next == u)
        lt = y;
      else
        rt = y;
    }
    if (lt != kNil) start_join(lt, u);
    if (rt != kNil) start_join(v, rt);
    checks_.push_back(u);
    checks_.push_back(v);
  }
  maybe_collapse_root();
}

void OrderedSet::untie(NodeId x) {
  Node& X = N(x);
  if (X.st != NState::tied) return;
  Ticket& t = tickets_[static_cast<std::size_t>(X.ticket)];
  if (t.ties[0] == x) t.ties[0] = kNil;
  if (t.ties[1] == x) t.ties[1] = kNil;
  X.st = NState::free;
  X.ticket = -1;
}

void OrderedSet::add_tie(TicketId tid, NodeId x) {
  Ticket& t = tickets_[static_cast<std::size_t>(tid)];
  if (t.ties[0] == kNil)
    t.ties[0] = x;
  else if (t.ties[1] == kNil)
    t.ties[1] = x;
  else {
    ++stats_.protocol_faults;
    return;
  }
  N(x).st = NState::tied;
  N(x).ticket = tid;
  ++stats_.ties;
}

// ---- protocol ----

std::int64_t OrderedSet::contribution(NodeId x) const {
  const Node& X = N(x);
  if (static_cast<unsigned>(X.level) == band_a_ + 1) return X.prop;
  return X.approx;
}

std::int64_t OrderedSet::decision_weight(const Node& x) const {
  if (cfg_.finger_mode && static_cast<unsigned>(x.level) >= band_a_ + 2) return x.approx;
  return x.weight;
}

void OrderedSet::check(NodeId x) {
  Node& X = N(x);
  if (X.dead || X.level == 0 || X.st == NState::busy) return;
  touch(x);
  const std::uint64_t b = table_.latency(static_cast<unsigned>(X.level));
  const std::int64_t w = decision_weight(X);
  const std::int64_t sb = static_cast<std::int64_t>(58 * b), mb = static_cast<std::int64_t>(24 * b);
  const NodeId p = parent(x);
  if (p == kNil) {
    if (w >= sb && w >= static_cast<std::int64_t>(21 * b)) start_split(x);
    return;
  }
  if (X.st == NState::tied) {
    if (w > mb) untie(x);
    return;
  }
  if (w >= sb) {
    start_split(x);
    return;
  }
  if (w > mb) return;
  const NodeId l = N(p).first_child == x ? kNil : X.prev;
  const NodeId r = N(p).last_child == x ? kNil : X.next;
  if (l != kNil) touch(l);
  if (r != kNil) touch(r);
  if (l != kNil && N(l).st != NState::busy) {
    start_join(l, x);
  } else if (r != kNil && N(r).st != NState::busy) {
    start_join(x, r);
  } else if (l != kNil) {
    add_tie(N(l).ticket, x);
  } else if (r != kNil) {
    add_tie(N(r).ticket, x);
  } else {
    ++stats_.protocol_faults;
  }
}

void OrderedSet::drain_checks() {
  for (std::size_t i = 0; i < checks_.size(); ++i) {
    if (i > 1000000) throw SchedulerError("protocol check cascade did not settle");
    check(checks_[i]);
  }
  checks_.clear();
}

OrderedSet::TicketId OrderedSet::start_join(NodeId l, NodeId r, NodeId carry_tie) {
  untie(l);
  untie(r);
  const NodeId p = parent(l);
  const int level = N(l).level;
  touch(l);
  touch(r);
  touch(p);

  Node& L = N(l);
  Node& R = N(r);
  const std::int64_t l_old_w = L.weight;
  L.last_child = R.last_child;
  L.nchildren += R.nchildren;
  L.weight += R.weight;
  L.approx += R.approx;
  L.prop += R.prop;
  L.next = R.next;
  if (R.next != kNil) N(R.next).prev = l;
  R.dead = true;
  R.forward = l;
  ++L.refs;
  R.st = NState::free;
  R.ticket = -1;
  if (cfg_.finger_mode && counters_.contains(r)) counter_unregister(r);

  // a redirect cursor parked on r moves past it
  if (R.parent != kNil) {
    const Node& RP = N(R.parent);
    if (RP.redirect_ticket >= 0) {
      Ticket& ot = tickets_[static_cast<std::size_t>(RP.redirect_ticket)];
      if (!ot.done && ot.redirect == r) ot.redirect = R.next;
    }
  }
  if (ascent_.active && ascent_.at == r) set_ascent(l);

  Node& P = N(p);
  if (P.last_child == r) P.last_child = l;
  --P.nchildren;
  ++P.child_version;
  cut_on_absorb(p, l, r, l_old_w, 0);

  const TicketId tid = new_ticket();
  Ticket& t = tickets_[static_cast<std::size_t>(tid)];
  t.split = false;
  t.done = false;
  t.level = level;
  t.u = l;
  t.v = r;
  t.budget = budget(level);
  t.open_time = ++clock_;
  t.redirect = N(r).first_child;
  t.redirect_from = r;
  t.redirect_to = l;
  ++N(r).refs;
  N(r).redirect_ticket = tid;

  N(l).st = NState::busy;
  N(l).ticket = tid;
  ++N(l).child_version;
  if (level >= 2 && N(r).s) {
    N(l).absorbed = r;
    ++N(r).refs;
  }
  if (level == 1) rebuild(l);
  cut_restart(l);
  if (carry_tie != kNil) add_tie(tid, carry_tie);
  ++stats_.joins;
  to_free_.push_back(r);

  maybe_collapse_root();
  step(tid);
  return tid;
}

bool OrderedSet::cuttable_before(NodeId c) const {
  const Node& B = N(c);
  if (B.prev == kNil) return true;
  const Node& A = N(B.prev);
  if (A.st == NState::free || B.st == NState::free) return true;
  return A.ticket != B.ticket;
}

OrderedSet::TicketId OrderedSet::start_split(NodeId u, const NodeId* carry_ties) {
  const int level = N(u).level;
  touch(u);
  const bool new_root = parent(u) == kNil;
  if (new_root) {
    const NodeId R = new_node(level + 1);
    Node& RN = N(R);
    RN.first_child = RN.last_child = u;
    RN.nchildren = 1;
    RN.weight = N(u).weight;
    RN.approx = contribution(u);
    RN.prop = N(u).weight;
    RN.splitter = N(u).splitter;
    N(u).parent = R;
    root_ = R;
    ++stats_.root_grows;
    if (cfg_.finger_mode && static_cast<unsigned>(level + 1) == band_a_ + 1) counter_register(R);
    cut_restart(R);
  }
  const NodeId p = parent(u);
  touch(p);

  // settle the cut, then step to the nearest boundary the segments allow
  cut_adjust(u, ~0u);
  Node& U = N(u);
  NodeId w = U.cut;
  std::int64_t left = U.prefix_w;
  std::uint32_t cnt = U.prefix_cnt;
  auto ok = [&](NodeId c) { return c != kNil && c != N(u).first_child && cuttable_before(c); };
  if (!ok(w)) {
    NodeId a = w, b = w;
    std::int64_t la = left, lb = left;
    std::uint32_t ca = cnt, cb = cnt;
    NodeId pick = kNil;
    for (unsigned i = 0; i < 64 && pick == kNil; ++i) {
      if (a != kNil && a != N(u).last_child) {
        la += N(a).weight;
        ++ca;
        a = N(a).next;
        if (ok(a)) {
          pick = a;
          left = la;
          cnt = ca;
          break;
        }
      } else {
        a = kNil;
      }
      if (b != kNil && b != N(u).first_child) {
        b = N(b).prev;
        lb -= N(b).weight;
        --cb;
        if (ok(b)) {
          pick = b;
          left = lb;
          cnt = cb;
          break;
        }
      } else {
        b = kNil;
      }
      if (a == kNil && b == kNil) break;
    }
    if (pick == kNil) {
      ++stats_.protocol_faults;
      return -1;
    }
    w = pick;
  }

  const std::int64_t W = U.weight;
  const std::uint64_t ni = table_.capacity(static_cast<unsigned>(level));
  const std::uint64_t imb = static_cast<std::uint64_t>(std::llabs(W - 2 * left));
  stats_.max_split_imbalance = std::max<std::uint64_t>(stats_.max_split_imbalance, imb * 12000 / ni);
  if (imb * 12 > ni) ++stats_.split_imbalance_violations;

  const NodeId v = new_node(level);
  Node& V = N(v);
  Node& U2 = N(u);
  V.splitter = N(w).splitter;
  V.prev = u;
  V.next = U2.next;
  if (U2.next != kNil) N(U2.next).prev = v;
  U2.next = v;
  V.parent = U2.parent;
  V.first_child = w;
  V.last_child = U2.last_child;
  U2.last_child = N(w).prev;
  V.nchildren = U2.nchildren - cnt;
  U2.nchildren = cnt;
  V.weight = W - left;
  U2.weight = left;
  V.approx = V.weight;
  U2.approx -= V.weight;
  V.prop = V.weight;
  U2.prop -= V.weight;
  if (cfg_.finger_mode && static_cast<unsigned>(level) == band_a_ + 1) counter_register(v);

  Node& P = N(p);
  if (P.last_child == u) P.last_child = v;
  ++P.nchildren;
  ++P.child_version;
  if (P.cut != kNil && P.cut != u && N(u).splitter < N(P.cut).splitter) ++P.prefix_cnt;

  const TicketId tid = new_ticket();
  Ticket& t = tickets_[static_cast<std::size_t>(tid)];
  t.split = true;
  t.done = false;
  t.level = level;
  t.u = u;
  t.v = v;
  t.budget = budget(level);
  t.open_time = ++clock_;
  t.redirect = w;
  t.redirect_from = u;
  t.redirect_to = v;
  N(u).redirect_ticket = tid;
  N(u).st = N(v).st = NState::busy;
  N(u).ticket = N(v).ticket = tid;
  ++N(u).child_version;
  ++N(v).child_version;
  if (level == 1) {
    for (NodeId c = w;; c = N(c).next) {
      N(c).parent = v;
      if (c == N(v).last_child) break;
    }
    t.redirect = kNil;
    N(u).redirect_ticket = -1;
    rebuild(u);
    rebuild(v);
  } else {
    N(v).fallback = N(u).s;
  }
  cut_restart(u);
  cut_restart(v);
  if (new_root) rebuild(p);
  if (carry_ties)
    for (int i = 0; i < 2; ++i)
      if (carry_ties[i] != kNil) add_tie(tid, carry_ties[i]);
  ++stats_.splits;
  step(tid);
  return tid;
}

void OrderedSet::maybe_collapse_root() {
  while (N(root_).level >= 2 && N(root_).nchildren == 1 && N(root_).st == NState::free) {
    const NodeId old = root_;
    const NodeId c = N(old).first_child;
    root_ = c;
    N(c).parent = kNil;
    N(old).dead = true;
    if (cfg_.finger_mode && counters_.contains(old)) counter_unregister(old);
    if (ascent_.active && ascent_.at == old) {
      set_ascent(kNil);
      ascent_.active = false;
    }
    to_free_.push_back(old);
    ++stats_.root_shrinks;
  }
}

// ---- cut child ----

void OrderedSet::cut_restart(NodeId x) {
  Node& X = N(x);
  X.cut = X.first_child;
  X.prefix_w = 0;
  X.prefix_cnt = 0;
  X.settling = true;
}

bool OrderedSet::cut_settled(NodeId x) const {
  const Node& X = N(x);
  if (X.first_child == kNil) return true;
  if (X.cut == kNil) return false;
  const NodeId c = X.cut;
  const std::int64_t W = X.weight;
  if (c != X.last_child && W - 2 * X.prefix_w > N(c).weight) return false;
  if (c != X.first_child && 2 * X.prefix_w - W > N(N(c).prev).weight) return false;
  return true;
}

void OrderedSet::cut_adjust(NodeId x, unsigned max_moves) {
  Node& X = N(x);
  if (X.first_child == kNil) {
    X.cut = kNil;
    X.prefix_w = 0;
    X.prefix_cnt = 0;
    return;
  }
  if (X.cut == kNil) cut_restart(x);
  const std::int64_t W = X.weight;
  for (unsigned i = 0; i < max_moves; ++i) {
    const NodeId c = X.cut;
    if (c != X.last_child && W - 2 * X.prefix_w > N(c).weight) {
      X.prefix_w += N(c).weight;
      ++X.prefix_cnt;
      X.cut = N(c).next;
    } else if (c != X.first_child && 2 * X.prefix_w - W > N(N(c).prev).weight) {
      const NodeId p = N(c).prev;
      X.prefix_w -= N(p).weight;
      --X.prefix_cnt;
      X.cut = p;
    } else {
      X.settling = false;
      return;
    }
  }
}

void OrderedSet::cut_on_absorb(NodeId pid, NodeId l, NodeId r, std::int64_t l_old_weight, std::uint32_t) {
  Node& P = N(pid);
  if (P.cut == kNil) return;
  if (P.cut == r) {
    const std::int64_t W = P.weight;
    const std::int64_t pa = P.prefix_w - l_old_weight;
    const std::int64_t pb = P.prefix_w + N(r).weight;
    const bool b_ok = l != P.last_child;
    if (b_ok && std::llabs(W - 2 * pb) < std::llabs(W - 2 * pa)) {
      P.cut = N(l).next;
      P.prefix_w = pb;
    } else {
      P.cut = l;
      P.prefix_w = pa;
      --P.prefix_cnt;
    }
  } else if (P.cut != l && N(r).splitter < N(P.cut).splitter) {
    --P.prefix_cnt;
  }
}

}  // namespace xset
