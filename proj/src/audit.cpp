#include <algorithm>
#include <cstdlib>
#include <string>

#include "ordered_set_internal.hpp"

namespace xset {

namespace {
constexpr std::uint64_t kNodeWords = 24;
constexpr std::uint64_t kElemWords = 5;
constexpr std::uint64_t kTicketWords = 10;
}  // namespace

std::uint64_t OrderedSet::space_usage() const {
  std::uint64_t w = 0;
  for (const Node& x : nodes_) {
    if (x.freed) continue;
    w += kNodeWords;
    if (x.s) w += x.s->search.words() + x.s->child.size();
  }
  w += (elems_.size() - free_elems_.size()) * kElemWords;
  w += (tickets_.size() - free_tickets_.size()) * kTicketWords;
  return w;
}

AuditReport OrderedSet::audit() const {
  AuditReport rep;
  auto fail = [&](const std::string& what) {
    if (rep.violations.size() < 64) rep.violations.push_back(what);
  };

  // element list
  std::uint64_t ecount = 0;
  for (std::uint32_t e = elems_[0].next, prev = 0; e != 0; prev = e, e = elems_[e].next) {
    const Element& el = elems_[e];
    if (!el.live) fail("dead element in list");
    if (prev != 0 && elems_[prev].key > el.key) fail("element list out of order");
    if (el.leaf == kNil || N(el.leaf).dead || N(el.leaf).key != el.key) fail("element leaf mismatch");
    if (++ecount > elements_ + 1) break;
  }
  if (ecount != elements_) fail("element count mismatch");
  rep.elements = ecount;

  // leaf list
  std::uint64_t lcount = 0;
  for (NodeId l = leaf_head_, prev = kNil; l != kNil; prev = l, l = N(l).next) {
    const Node& L = N(l);
    if (L.dead) fail("dead leaf linked");
    if (prev == kNil && L.splitter != 0) fail("first leaf splitter not 0");
    if (prev != kNil && N(prev).splitter >= L.splitter) fail("leaf splitters not increasing");
    if (L.splitter > L.key) fail("leaf key below its splitter");
    if (L.next != kNil && N(L.next).splitter <= L.key) fail("leaf key beyond next splitter");
    if (L.elem_count == 0) fail("empty leaf bucket");
    if (++lcount > leaves_ + 1) break;
  }
  if (lcount != leaves_) fail("leaf count mismatch");
  rep.leaves = lcount;

  // tree walk, level by level
  const Node& R = N(root_);
  rep.height = static_cast<unsigned>(R.level);
  if (R.dead || R.parent != kNil) fail("bad root");
  if (R.weight != static_cast<std::int64_t>(leaves_)) fail("root weight mismatch");
  if (static_cast<std::uint64_t>(R.weight) > table_.capacity(static_cast<unsigned>(R.level)))
    fail("root above capacity at level " + std::to_string(R.level));
  if (R.level >= 2 && R.nchildren < 2 && R.st == NState::free) fail("root with fewer than 2 children");

  std::vector<NodeId> cur{root_}, nxt;
  while (!cur.empty() && N(cur.front()).level > 0) {
    nxt.clear();
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
      const NodeId x = cur[idx];
      const Node& X = N(x);
      ++rep.nodes;
      const unsigned lv = static_cast<unsigned>(X.level);
      const std::string at = " (level " + std::to_string(lv) + ")";
      if (X.dead) fail("dead node in tree" + at);
      if (x != root_) {
        const std::uint64_t ni = table_.capacity(lv);
        const std::int64_t lo = static_cast<std::int64_t>(ceil_div(ni, 4)), hi = static_cast<std::int64_t>(ni);
        if (X.weight < lo || X.weight > hi)
          fail("weight " + std::to_string(X.weight) + " outside window" + at);
      }
      if (X.first_child == kNil) {
        if (x != root_) fail("childless internal node" + at);
        continue;
      }
      if (X.splitter != N(X.first_child).splitter) fail("splitter differs from first child" + at);
      std::int64_t wsum = 0, before = 0;
      std::uint32_t cnt = 0, cnt_before = 0;
      bool seen_cut = false;
      for (NodeId c = X.first_child;; c = N(c).next) {
        if (c == kNil || cnt > X.nchildren + 1) {
          fail("broken child list" + at);
          break;
        }
        if (N(c).dead) fail("dead child" + at);
        if (parent(c) != x) fail("parent resolution mismatch" + at);
        if (N(c).level != X.level - 1) fail("child level mismatch" + at);
        if (c == X.cut) {
          seen_cut = true;
          before = wsum;
          cnt_before = cnt;
        }
        wsum += N(c).weight;
        ++cnt;
        nxt.push_back(c);
        if (c == X.last_child) break;
      }
      if (cnt != X.nchildren) fail("child count mismatch" + at);
      if (wsum != X.weight) fail("weight sum mismatch" + at);
      if (X.cut != kNil) {
        if (!seen_cut) fail("cut child not a child" + at);
        else if (before != X.prefix_w || cnt_before != X.prefix_cnt) fail("cut prefix mismatch" + at);
        else if (X.st == NState::free && !X.settling) {
          const std::uint64_t ni = table_.capacity(lv);
          if (static_cast<std::uint64_t>(std::llabs(X.weight - 2 * before)) * 12 > ni) fail("cut imbalance" + at);
        }
      }
      if (idx + 1 < cur.size() && X.next != cur[idx + 1]) fail("level list gap" + at);
      if (cfg_.finger_mode && lv >= band_a_ + 2) {
        const std::uint64_t err = static_cast<std::uint64_t>(std::llabs(X.approx - X.weight));
        const std::uint64_t ni = table_.capacity(lv);
        rep.max_approx_error = std::max<std::uint64_t>(rep.max_approx_error, err * 8000 / ni);
        if (err * 8 > ni) fail("approximate weight drift" + at);
      }
    }
    std::swap(cur, nxt);
  }
  if (!cur.empty() && !cur.empty() && cur.front() != leaf_head_) fail("leaf level does not start at the head");
  if (!cur.empty() && cur.size() != leaves_) fail("tree leaves differ from leaf list");

  // tickets
  for (std::size_t t = 0; t < tickets_.size(); ++t) {
    const Ticket& tk = tickets_[t];
    if (tk.done) continue;
    const Node& U = N(tk.u);
    if (U.st != NState::busy || U.ticket != static_cast<TicketId>(t)) fail("ticket participant not busy");
    for (NodeId y : tk.ties)
      if (y != kNil && (N(y).st != NState::tied || N(y).ticket != static_cast<TicketId>(t))) fail("stale tie");
  }
  return rep;
}

}  // namespace xset
