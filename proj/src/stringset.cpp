#include "xset/stringset.hpp"

#include <algorithm>
#include <cmath>

namespace xset {

StringSet::StringSet(const StringSetConfig& cfg) : cfg_(cfg) {
  if (!(cfg_.k > 1.0)) throw ConfigError("string set exponent must exceed 1");
  heavy_exp_ = 1.0 - 1.0 / cfg_.k;
  root_ = new_node(false);
}

StringSet::~StringSet() = default;

std::uint64_t StringSet::heavy_threshold(std::uint64_t m) const {
  return static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(m), heavy_exp_) + 1e-9));
}

std::uint64_t StringSet::rebuild_period(std::uint64_t m) const { return std::max<std::uint64_t>(1, heavy_threshold(m) / 4); }

StringSet::Str StringSet::encode(const Str& s) const {
  Str out;
  out.reserve(s.size() + 1);
  for (Key c : s) {
    if (c == kKeyMax) throw DomainError("the all-ones character is reserved");
    out.push_back(c + 1);
  }
  out.push_back(0);
  return out;
}

StringSet::Str StringSet::decode(const Str& s) const {
  Str out;
  out.reserve(s.size());
  for (std::size_t i = 0; i + 1 < s.size(); ++i) out.push_back(s[i] - 1);
  return out;
}

StringSet::Id StringSet::new_node(bool leaf) {
  Id id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
    const std::uint32_t g = N(id).gen + 1;
    *nodes_[static_cast<std::size_t>(id)] = TNode{};
    N(id).gen = g;
  } else {
    id = static_cast<Id>(nodes_.size());
    nodes_.push_back(std::make_unique<TNode>());
  }
  TNode& x = N(id);
  x.alive = true;
  x.leaf = leaf;
  if (!leaf) {
    Config c;
    c.sstruct = cfg_.sstruct;
    x.light = std::make_unique<OrderedSet>(c);
  }
  return id;
}

void StringSet::kill(Id x) {
  TNode& X = N(x);
  X.alive = false;
  X.light.reset();
  X.heavy = PerfectHash();
  X.heavy_child.clear();
  X.cand.clear();
  X.str.clear();
  X.str.shrink_to_fit();
  free_.push_back(x);
}

StringSet::Id StringSet::child(Id x, Key label) const {
  const TNode& X = N(x);
  if (auto i = X.heavy.lookup(label)) {
    auto [c, g] = X.heavy_child[*i];
    if (c != kNone && N(c).alive && N(c).gen == g && N(c).parent == x && N(c).label == label) {
      ++stats_.heavy_hits;
      return c;
    }
  }
  ++stats_.light_lookups;
  auto h = X.light->lookup(label);
  if (!h) return kNone;
  return static_cast<Id>(X.light->payload(*h));
}

StringSet::Descent StringSet::descend(const Str& s) const {
  Descent r;
  Id x = root_;
  std::uint64_t visits = 1;
  for (;;) {
    r.path.push_back(x);
    const std::size_t d = N(x).depth;
    const Id c = child(x, s[d]);
    if (c == kNone) {
      r.node = x;
      r.at = d;
      r.stop = Stop::no_child;
      break;
    }
    ++visits;
    const TNode& C = N(c);
    const Str& rs = ref(c);
    const std::size_t lim = C.leaf ? std::min(s.size(), rs.size()) : C.depth;
    std::size_t j = d + 1;
    while (j < lim && s[j] == rs[j]) ++j;
    if (j < lim) {
      r.node = c;
      r.at = j;
      r.stop = Stop::mismatch;
      break;
    }
    if (C.leaf) {
      // both end in the terminator, so a full match means equal strings
      r.node = c;
      r.at = j;
      r.stop = Stop::exact;
      break;
    }
    x = c;
  }
  stats_.last_visits = visits;
  stats_.max_visits = std::max(stats_.max_visits, visits);
  stats_.last_lcp = r.at;
  return r;
}

std::size_t StringSet::lcp_length(const Str& s) const {
  const Str e = encode(s);
  Descent r = descend(e);
  return std::min(r.at, s.size());
}

bool StringSet::contains(const Str& s) const { return descend(encode(s)).stop == Stop::exact; }

std::optional<StringSet::Str> StringSet::search(const Str& s) const {
  const Str e = encode(s);
  Descent r = descend(e);
  Id ans = kNone;
  switch (r.stop) {
    case Stop::exact:
      ans = r.node;
      break;
    case Stop::no_child: {
      const TNode& X = N(r.node);
      auto h = X.light->search(e[r.at]);
      if (h)
        ans = N(static_cast<Id>(X.light->payload(*h))).last_leaf;
      else if (X.first_leaf != kNone)
        ans = N(X.first_leaf).prev_leaf;
      break;
    }
    case Stop::mismatch: {
      const TNode& C = N(r.node);
      if (e[r.at] > ref(r.node)[r.at])
        ans = C.leaf ? r.node : C.last_leaf;
      else
        ans = N(C.leaf ? r.node : C.first_leaf).prev_leaf;
      break;
    }
  }
  if (ans == kNone) return std::nullopt;
  return decode(N(ans).str);
}

// ---- children and leaf list ----

void StringSet::add_child(Id x, Id c) {
  N(c).parent = x;
  N(x).light->insert(N(c).label, static_cast<std::uint64_t>(c));
}

void StringSet::replace_child(Id x, Id old_c, Id new_c) {
  TNode& X = N(x);
  const Key label = N(old_c).label;
  auto h = X.light->lookup(label);
  X.light->set_payload(*h, static_cast<std::uint64_t>(new_c));
  N(new_c).parent = x;
  N(new_c).label = label;
  if (auto i = X.heavy.lookup(label)) X.heavy_child[*i] = {new_c, N(new_c).gen};
  if (N(old_c).in_cand) {
    const std::uint32_t pos = N(old_c).cand_pos;
    X.cand[pos] = new_c;
    N(new_c).in_cand = true;
    N(new_c).cand_pos = pos;
    N(old_c).in_cand = false;
  }
  if (X.sweep && !X.light->valid(*X.sweep)) X.sweep.reset();
}

void StringSet::remove_child(Id x, Id c) {
  TNode& X = N(x);
  drop_cand(x, c);
  if (X.sweep && X.light->valid(*X.sweep) && X.light->key(*X.sweep) == N(c).label) X.sweep.reset();
  X.light->delete_key(N(c).label);
}

void StringSet::link_leaf(Id leaf, Id after) {
  TNode& L = N(leaf);
  L.prev_leaf = after;
  L.next_leaf = after == kNone ? head_ : N(after).next_leaf;
  if (L.next_leaf != kNone) N(L.next_leaf).prev_leaf = leaf;
  if (after == kNone)
    head_ = leaf;
  else
    N(after).next_leaf = leaf;
}

void StringSet::unlink_leaf(Id leaf) {
  TNode& L = N(leaf);
  if (L.prev_leaf != kNone) N(L.prev_leaf).next_leaf = L.next_leaf;
  if (L.next_leaf != kNone) N(L.next_leaf).prev_leaf = L.prev_leaf;
  if (head_ == leaf) head_ = L.next_leaf;
}

// ---- heavy children ----

void StringSet::drop_cand(Id x, Id c) {
  TNode& C = N(c);
  if (!C.in_cand) return;
  auto& v = N(x).cand;
  const std::uint32_t pos = C.cand_pos;
  v[pos] = v.back();
  N(v[pos]).cand_pos = pos;
  v.pop_back();
  C.in_cand = false;
}

void StringSet::update_cand(Id x, Id c) {
  TNode& C = N(c);
  const std::uint64_t t = heavy_threshold(N(x).weight);
  if (!C.in_cand && 2 * C.weight > t) {
    C.in_cand = true;
    C.cand_pos = static_cast<std::uint32_t>(N(x).cand.size());
    N(x).cand.push_back(c);
  } else if (C.in_cand && 2 * C.weight + 2 <= t) {
    drop_cand(x, c);
  }
}

void StringSet::rebuild_heavy(Id x) {
  TNode& X = N(x);
  std::vector<std::pair<Key, Id>> items;
  items.reserve(X.cand.size());
  for (Id c : X.cand) items.emplace_back(N(c).label, c);
  std::sort(items.begin(), items.end());
  std::vector<Key> labels;
  X.heavy_child.clear();
  for (auto& [l, c] : items) {
    labels.push_back(l);
    X.heavy_child.emplace_back(c, N(c).gen);
  }
  X.heavy = PerfectHash(std::move(labels));
  X.countdown = rebuild_period(X.weight);
  ++stats_.heavy_rebuilds;
}

// per update: refresh the path child's candidacy, sweep two more children,
// and count down toward the next dictionary build
void StringSet::maintain(const std::vector<Id>& path, Id bottom) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Id x = path[i];
    if (!N(x).alive) continue;
    const Id c = i + 1 < path.size() ? path[i + 1] : bottom;
    if (c != kNone && N(c).alive && N(c).parent == x) update_cand(x, c);
    TNode& X = N(x);
    for (int s = 0; s < 2 && X.light->size() > 0; ++s) {
      if (!X.sweep || !X.light->valid(*X.sweep)) X.sweep = X.light->minimum();
      const Id y = static_cast<Id>(X.light->payload(*X.sweep));
      update_cand(x, y);
      X.sweep = X.light->successor(*X.sweep);
    }
    if (--N(x).countdown == 0) rebuild_heavy(x);
  }
}

// ---- updates ----

void StringSet::insert(const Str& s) {
  const Str e = encode(s);
  Descent r = descend(e);
  ++size_;
  if (r.stop == Stop::exact) {
    ++N(r.node).count;
    ++N(r.node).weight;
    for (Id x : r.path) ++N(x).weight;
    maintain(r.path, r.node);
    return;
  }
  const Id leaf = new_node(true);
  N(leaf).str = e;
  N(leaf).count = 1;
  N(leaf).weight = 1;
  N(leaf).first_leaf = N(leaf).last_leaf = leaf;

  Id bottom = leaf;
  if (r.stop == Stop::no_child) {
    const Id x = r.node;
    N(leaf).label = e[r.at];
    auto h = N(x).light->search(e[r.at]);
    Id after = h ? N(static_cast<Id>(N(x).light->payload(*h))).last_leaf
                 : (N(x).first_leaf == kNone ? kNone : N(N(x).first_leaf).prev_leaf);
    add_child(x, leaf);
    link_leaf(leaf, after);
  } else {
    // split the edge into c with a new branching node at the first difference
    const Id c = r.node;
    const Id x = r.path.back();
    const Id y = new_node(false);
    const Key c_label = ref(c)[r.at];
    N(y).depth = static_cast<std::uint32_t>(r.at);
    N(y).weight = N(c).weight;
    N(y).first_leaf = N(c).first_leaf;
    N(y).last_leaf = N(c).last_leaf;
    replace_child(x, c, y);
    N(c).label = c_label;
    add_child(y, c);
    N(leaf).label = e[r.at];
    add_child(y, leaf);
    if (e[r.at] < c_label)
      link_leaf(leaf, N(N(c).first_leaf).prev_leaf);
    else
      link_leaf(leaf, N(c).last_leaf);
    ++N(y).weight;
    if (N(leaf).next_leaf == N(y).first_leaf) N(y).first_leaf = leaf;
    if (N(leaf).prev_leaf == N(y).last_leaf) N(y).last_leaf = leaf;
    update_cand(y, c);
    r.path.push_back(y);
  }
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    TNode& X = N(r.path[i]);
    if (r.stop == Stop::mismatch && i + 1 == r.path.size()) break;  // y is already set
    ++X.weight;
    if (X.first_leaf == kNone || X.first_leaf == N(leaf).next_leaf) X.first_leaf = leaf;
    if (X.last_leaf == kNone || X.last_leaf == N(leaf).prev_leaf) X.last_leaf = leaf;
  }
  maintain(r.path, bottom);
}

bool StringSet::erase(const Str& s) {
  const Str e = encode(s);
  Descent r = descend(e);
  if (r.stop != Stop::exact) return false;
  --size_;
  const Id leaf = r.node;
  for (Id x : r.path) --N(x).weight;
  if (--N(leaf).count > 0) {
    --N(leaf).weight;
    maintain(r.path, leaf);
    return true;
  }
  const Id prev = N(leaf).prev_leaf, next = N(leaf).next_leaf;
  for (Id x : r.path) {
    TNode& X = N(x);
    if (X.first_leaf == leaf && X.last_leaf == leaf) {
      X.first_leaf = X.last_leaf = kNone;
    } else {
      if (X.first_leaf == leaf) X.first_leaf = next;
      if (X.last_leaf == leaf) X.last_leaf = prev;
    }
  }
  const Id p = N(leaf).parent;
  remove_child(p, leaf);
  unlink_leaf(leaf);
  kill(leaf);

  // a non-root branching node left with one child is spliced out
  Id bottom = kNone;
  if (p != root_ && N(p).light->size() == 1) {
    const Id only = static_cast<Id>(N(p).light->payload(*N(p).light->minimum()));
    const Id gp = N(p).parent;
    drop_cand(p, only);
    replace_child(gp, p, only);
    kill(p);
    r.path.pop_back();
    bottom = only;
  }
  maintain(r.path, bottom);
  return true;
}

// ---- accounting ----

std::uint64_t StringSet::space_units() const {
  std::uint64_t w = 0;
  for (const auto& np : nodes_) {
    const TNode& x = *np;
    if (!x.alive) continue;
    w += 16;
    if (!x.leaf) {
      w += x.light->space_usage();
      w += x.heavy.words() + x.heavy_child.size() + x.cand.size();
    }
  }
  return w;
}

StringAudit StringSet::audit() const {
  StringAudit a;
  auto fail = [&](const std::string& m) {
    if (a.violations.size() < 64) a.violations.push_back(m);
  };
  // leaf list order and total weight
  std::uint64_t total = 0;
  for (Id l = head_, prev = kNone; l != kNone; prev = l, l = N(l).next_leaf) {
    if (!N(l).alive || !N(l).leaf) fail("bad leaf in list");
    if (prev != kNone && !(N(prev).str < N(l).str)) fail("leaf list out of order");
    total += N(l).count;
  }
  if (total != size_) fail("size mismatch");

  // recursive walk with an explicit stack
  std::vector<Id> stack{root_};
  while (!stack.empty()) {
    const Id x = stack.back();
    stack.pop_back();
    const TNode& X = N(x);
    if (X.leaf) {
      ++a.leaves;
      if (X.weight != X.count || X.count == 0) fail("leaf weight");
      continue;
    }
    ++a.internal_nodes;
    if (x != root_ && X.light->size() < 2) fail("unary branching node");
    std::uint64_t w = 0;
    Id first = kNone, last = kNone;
    const std::uint64_t t = heavy_threshold(X.weight);
    std::size_t ncand = 0;
    for (auto h = X.light->minimum(); h; h = X.light->successor(*h)) {
      const Id c = static_cast<Id>(X.light->payload(*h));
      const TNode& C = N(c);
      if (!C.alive || C.parent != x || C.label != X.light->key(*h)) fail("child link mismatch");
      const Str& rs = ref(c);
      if (rs.size() <= X.depth || rs[X.depth] != C.label) fail("label does not match the subtree");
      if (!C.leaf && C.depth <= X.depth) fail("depth not increasing");
      if (X.first_leaf != kNone && ref(x).size() > X.depth &&
          !std::equal(rs.begin(), rs.begin() + X.depth, ref(x).begin()))
        fail("subtree prefix mismatch");
      w += C.weight;
      if (first == kNone) first = C.first_leaf;
      last = C.last_leaf;
      // heavy coverage
      if (C.weight > t) {
        auto i = X.heavy.lookup(C.label);
        if (!i || X.heavy_child[*i].first != c || X.heavy_child[*i].second != C.gen) ++a.coverage_violations;
      }
      const bool should = 2 * C.weight > t;
      if (should != C.in_cand) ++a.candidate_mismatches;
      if (C.in_cand) ++ncand;
      stack.push_back(c);
    }
    if (ncand != X.cand.size()) fail("candidate list size");
    if (w != X.weight) fail("weight sum mismatch");
    if (first != X.first_leaf || last != X.last_leaf) fail("subtree boundary mismatch");
  }
  return a;
}

}  // namespace xset
