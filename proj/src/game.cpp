#include "xset/game.hpp"

#include <algorithm>
#include <limits>

namespace xset {

GameStrategy parse_game_strategy(const std::string& name) {
  if (name == "random") return GameStrategy::random;
  if (name == "grow") return GameStrategy::grow;
  if (name == "shrink") return GameStrategy::shrink;
  if (name == "sawtooth") return GameStrategy::sawtooth;
  throw ConfigError("unknown game strategy: " + name);
}

std::string game_strategy_name(GameStrategy s) {
  switch (s) {
    case GameStrategy::random: return "random";
    case GameStrategy::grow: return "grow";
    case GameStrategy::shrink: return "shrink";
    case GameStrategy::sawtooth: return "sawtooth";
  }
  return "?";
}

WeightGame::WeightGame(const GameConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
  if (cfg.b < 1) throw ConfigError("game latency b must be positive");
  if (cfg.mu <= 1) throw ConfigError("game requires mu > 1");
  if (cfg.delta < 0) throw ConfigError("game split error must be non-negative");
  stats_.min_weight = std::numeric_limits<std::int64_t>::max();
  stats_.min_split_half = std::numeric_limits<std::int64_t>::max();
}

int WeightGame::new_weight(std::int64_t w, int list) {
  int id;
  if (!free_ids_.empty()) {
    id = free_ids_.back();
    free_ids_.pop_back();
    w_[id] = Weight{};
  } else {
    id = static_cast<int>(w_.size());
    w_.emplace_back();
  }
  w_[id].w = w;
  w_[id].list = list;
  w_[id].alive_pos = static_cast<int>(alive_.size());
  alive_.push_back(id);
  return id;
}

void WeightGame::kill_weight(int id) {
  int pos = w_[id].alive_pos;
  int last = alive_.back();
  alive_[pos] = last;
  w_[last].alive_pos = pos;
  alive_.pop_back();
  w_[id].alive_pos = -1;
  free_ids_.push_back(id);
}

int WeightGame::new_proc(bool split) {
  int pid;
  if (!free_procs_.empty()) {
    pid = free_procs_.back();
    free_procs_.pop_back();
    procs_[pid] = Proc{};
  } else {
    pid = static_cast<int>(procs_.size());
    procs_.emplace_back();
  }
  procs_[pid].split = split;
  recent_proc_ = pid;
  return pid;
}

int WeightGame::add_list(const std::vector<std::int64_t>& weights) {
  if (weights.empty()) throw AdversaryFault("empty list");
  int l = static_cast<int>(lists_.size());
  lists_.push_back({});
  int prev = -1;
  for (std::int64_t x : weights) {
    if (x <= cfg_.m() * cfg_.b || x >= cfg_.s() * cfg_.b) throw AdversaryFault("start weight outside the neutral range");
    int id = new_weight(x, l);
    w_[id].prev = prev;
    if (prev >= 0)
      w_[prev].next = id;
    else
      lists_[l].head = id;
    lists_[l].total += x;
    prev = id;
    observe(id);
  }
  return l;
}

int WeightGame::recent_participant() const {
  if (recent_proc_ < 0) return -1;
  const Proc& p = procs_[recent_proc_];
  if (p.done) return -1;
  return p.a;
}

void WeightGame::remove_tie(int pid, int wid) {
  Proc& p = procs_[pid];
  if (p.ties[0] == wid) {
    p.ties[0] = p.ties[1];
    p.ties[1] = -1;
  } else if (p.ties[1] == wid) {
    p.ties[1] = -1;
  }
}

void WeightGame::untie(int id) {
  Weight& x = w_[id];
  if (x.st != State::tied) return;
  remove_tie(x.proc, id);
  x.st = State::free;
  x.proc = -1;
}

void WeightGame::update(int id, int dir) {
  if (id < 0 || static_cast<std::size_t>(id) >= w_.size() || w_[id].alive_pos < 0) throw AdversaryFault("update of a dead weight");
  if (dir != 1 && dir != -1) throw AdversaryFault("updates change a weight by one");
  List& l = lists_[w_[id].list];
  if (dir < 0 && l.total - 1 <= cfg_.m() * cfg_.b) throw AdversaryFault("list total would drop to (mu+3)b");
  w_[id].w += dir;
  l.total += dir;
  ++stats_.rounds;
  work_.push_back(id);
  if (w_[id].st != State::free) step(w_[id].proc);
  drain();
}

void WeightGame::step(int pid) {
  Proc& p = procs_[pid];
  if (++p.steps >= cfg_.b) {
    if (p.split && p.b < 0) cut_split(pid);
    finish(pid);
  }
}

void WeightGame::cut_split(int pid) {
  Proc& p = procs_[pid];
  const int a = p.a;
  const std::int64_t w = w_[a].w;
  // adversary takes the most lopsided cut allowed
  std::int64_t d = cfg_.delta * cfg_.b;
  if ((w - d) % 2 != 0) d -= 1;
  if (d < 0) d = 0;
  if (rng_() & 1) d = -d;
  std::int64_t left = (w + d) / 2;
  std::int64_t right = w - left;
  int r = new_weight(right, w_[a].list);
  w_[a].w = left;
  w_[r].prev = a;
  w_[r].next = w_[a].next;
  if (w_[a].next >= 0) w_[w_[a].next].prev = r;
  w_[a].next = r;
  w_[r].st = State::busy;
  w_[r].proc = pid;
  procs_[pid].b = r;
  stats_.min_split_half = std::min({stats_.min_split_half, left, right});
  stats_.max_split_half = std::max({stats_.max_split_half, left, right});
  work_.push_back(a);
  work_.push_back(r);
}

void WeightGame::start_join(int left, int right) {
  untie(left);
  untie(right);
  Weight& L = w_[left];
  Weight& R = w_[right];
  L.w += R.w;
  L.next = R.next;
  if (R.next >= 0) w_[R.next].prev = left;
  kill_weight(right);
  int pid = new_proc(false);
  procs_[pid].a = left;
  w_[left].st = State::busy;
  w_[left].proc = pid;
  ++stats_.joins;
  work_.push_back(left);
}

void WeightGame::start_split(int id) {
  int pid = new_proc(true);
  procs_[pid].a = id;
  w_[id].st = State::busy;
  w_[id].proc = pid;
  ++stats_.splits;
  if (!cfg_.defer_split) cut_split(pid);
  work_.push_back(id);
}

void WeightGame::finish(int pid) {
  Proc p = procs_[pid];  // copy: the slot is recycled below
  procs_[pid].done = true;
  free_procs_.push_back(pid);
  if (recent_proc_ == pid) recent_proc_ = -1;
  const std::int64_t s = cfg_.s() * cfg_.b;
  if (!p.split) {
    const int j = p.a;
    w_[j].st = State::free;
    w_[j].proc = -1;
    if (w_[j].w >= s) {
      // split at once; the ties move over to the new process
      start_split(j);
      int np = w_[j].proc;
      for (int t : p.ties)
        if (t >= 0) {
          w_[t].proc = np;
          procs_[np].ties[procs_[np].ties[0] < 0 ? 0 : 1] = t;
        }
      return;
    }
    if (p.ties[0] >= 0) {
      const int t0 = p.ties[0], t1 = p.ties[1];
      w_[t0].st = State::free;
      w_[t0].proc = -1;
      if (w_[t0].next == j)
        start_join(t0, j);
      else
        start_join(j, t0);
      if (t1 >= 0) {
        int np = recent_proc_;
        w_[t1].proc = np;
        procs_[np].ties[0] = t1;
      }
      return;
    }
    work_.push_back(j);
    return;
  }
  const int a = p.a, b = p.b;
  w_[a].st = State::free;
  w_[a].proc = -1;
  w_[b].st = State::free;
  w_[b].proc = -1;
  int lt = -1, rt = -1;
  for (int t : p.ties) {
    if (t < 0) continue;
    w_[t].st = State::free;
    w_[t].proc = -1;
    if (w_[t].next == a)
      lt = t;
    else
      rt = t;
  }
  if (lt >= 0)
    start_join(lt, a);
  else
    work_.push_back(a);
  if (rt >= 0)
    start_join(b, rt);
  else
    work_.push_back(b);
}

void WeightGame::check(int id) {
  Weight& x = w_[id];
  const std::int64_t m = cfg_.m() * cfg_.b, s = cfg_.s() * cfg_.b;
  if (x.st == State::busy) return;
  if (x.st == State::tied) {
    if (x.w <= m) return;
    untie(id);
  }
  if (x.w >= s) {
    start_split(id);
    return;
  }
  if (x.w > m) return;
  const int l = x.prev, r = x.next;
  if (l >= 0 && w_[l].st != State::busy) {
    start_join(l, id);
  } else if (r >= 0 && w_[r].st != State::busy) {
    start_join(id, r);
  } else {
    int nb = l >= 0 ? l : r;
    if (nb < 0) throw AdversaryFault("lone weight at or below (mu+3)b");
    Proc& p = procs_[w_[nb].proc];
    if (p.ties[1] >= 0) throw SchedulerError("process already tied from both sides");
    p.ties[p.ties[0] < 0 ? 0 : 1] = id;
    x.st = State::tied;
    x.proc = w_[nb].proc;
    ++stats_.ties;
  }
}

void WeightGame::drain() {
  for (std::size_t i = 0; i < work_.size(); ++i) {
    int id = work_[i];
    if (w_[id].alive_pos >= 0) check(id);
  }
  for (int id : work_)
    if (w_[id].alive_pos >= 0) observe(id);
  work_.clear();
}

bool WeightGame::cuttable_after(int id) const {
  const Weight& x = w_[id];
  if (x.next < 0) return true;
  const Weight& y = w_[x.next];
  if (x.st == State::free || y.st == State::free) return true;
  if (x.proc != y.proc) return true;
  return x.st == State::busy || y.st == State::busy;
}

std::int64_t WeightGame::segment_weight(int id) const {
  int first = id;
  while (w_[first].prev >= 0 && !cuttable_after(w_[first].prev)) first = w_[first].prev;
  std::int64_t sum = 0;
  for (int c = first;; c = w_[c].next) {
    sum += w_[c].w;
    if (cuttable_after(c)) break;
  }
  return sum;
}

void WeightGame::observe(int id) {
  const Weight& x = w_[id];
  stats_.min_weight = std::min(stats_.min_weight, x.w);
  stats_.max_weight = std::max(stats_.max_weight, x.w);
  if (x.st == State::free) {
    stats_.max_segment = std::max(stats_.max_segment, x.w);
    return;
  }
  if (x.st == State::busy && !procs_[x.proc].split) stats_.max_join_weight = std::max(stats_.max_join_weight, x.w);
  stats_.max_segment = std::max(stats_.max_segment, segment_weight(id));
}

void WeightGame::cut_after(int id) {
  if (w_[id].alive_pos < 0 || w_[id].next < 0) throw AdversaryFault("cut needs a weight with a successor");
  if (!cuttable_after(id)) throw AdversaryFault("cut between weights of one process");
  const int l = w_[id].list;
  std::int64_t left = 0;
  for (int c = lists_[l].head; c != w_[id].next; c = w_[c].next) left += w_[c].w;
  const std::int64_t right = lists_[l].total - left;
  const std::int64_t floor = cfg_.m() * cfg_.b;
  if (left <= floor || right <= floor) throw AdversaryFault("cut leaves a list at or below (mu+3)b");
  int nl = static_cast<int>(lists_.size());
  lists_.push_back({w_[id].next, right});
  lists_[l].total = left;
  w_[w_[id].next].prev = -1;
  for (int c = w_[id].next; c >= 0; c = w_[c].next) w_[c].list = nl;
  w_[id].next = -1;
  ++stats_.rounds;
}

void WeightGame::concat(int a, int b) {
  if (a == b || !list_alive(a) || !list_alive(b)) throw AdversaryFault("concat needs two distinct live lists");
  int tail = lists_[a].head;
  while (w_[tail].next >= 0) tail = w_[tail].next;
  int h = lists_[b].head;
  for (int c = h; c >= 0; c = w_[c].next) w_[c].list = a;
  w_[tail].next = h;
  w_[h].prev = tail;
  lists_[a].total += lists_[b].total;
  lists_[b] = List{};
  ++stats_.rounds;
  work_.push_back(tail);
  work_.push_back(h);
  drain();
}

std::vector<std::string> WeightGame::audit() const {
  std::vector<std::string> out;
  const std::int64_t b = cfg_.b;
  for (std::size_t l = 0; l < lists_.size(); ++l) {
    if (lists_[l].head < 0) continue;
    std::int64_t total = 0;
    for (int c = lists_[l].head; c >= 0; c = w_[c].next) {
      const Weight& x = w_[c];
      total += x.w;
      if (x.list != static_cast<int>(l)) out.push_back("weight " + std::to_string(c) + " has a stale list id");
      if (x.w < cfg_.mu * b || x.w > 4 * cfg_.mu * b)
        out.push_back("weight " + std::to_string(c) + " = " + std::to_string(x.w) + " outside [21b, 84b]");
      if (x.st == State::free && x.w <= cfg_.m() * b) out.push_back("free weight at or below m*b");
      if (x.st == State::free && x.w >= cfg_.s() * b) out.push_back("free weight at or above s*b");
      if (x.st == State::tied) {
        const Proc& p = procs_[x.proc];
        if (p.ties[0] != c && p.ties[1] != c) out.push_back("tie not recorded at its process");
        bool adjacent = (x.prev >= 0 && w_[x.prev].st == State::busy && w_[x.prev].proc == x.proc) ||
                        (x.next >= 0 && w_[x.next].st == State::busy && w_[x.next].proc == x.proc);
        if (!adjacent) out.push_back("tied weight not adjacent to its process");
      }
      if ((x.prev < 0 || cuttable_after(x.prev)) && segment_weight(c) > (3 * cfg_.m() + cfg_.s() + 1) * b)
        out.push_back("uncuttable segment above (3m+s+1)b");
    }
    if (total != lists_[l].total) out.push_back("list total drifted");
  }
  return out;
}

namespace {

std::vector<std::int64_t> neutral_weights(const GameConfig& cfg, std::size_t n, std::mt19937_64& rng) {
  const std::int64_t lo = cfg.m() * cfg.b + 1, hi = cfg.s() * cfg.b - 1;
  std::vector<std::int64_t> v(n);
  for (auto& x : v) x = lo + static_cast<std::int64_t>(rng() % std::uint64_t(hi - lo + 1));
  return v;
}

}  // namespace

GameStats game_simulate(const GameConfig& cfg, GameStrategy strategy, std::uint64_t rounds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WeightGame g(cfg, seed ^ 0x9e3779b97f4a7c15ull);
  const std::int64_t floor = cfg.m() * cfg.b;
  auto safe_update = [&](int id, int dir) {
    if (dir < 0 && g.list_total(g.list_of(id)) - 1 <= floor) dir = 1;
    g.update(id, dir);
  };
  auto pick_hot = [&](unsigned one_in) {
    int p = g.recent_participant();
    if (p >= 0 && rng() % one_in == 0) return p;
    return g.random_weight(rng);
  };

  switch (strategy) {
    case GameStrategy::random: {
      for (int l = 0; l < 4; ++l) g.add_list(neutral_weights(cfg, 8, rng));
      const double target = 32.0 * 41.0 * double(cfg.b);
      std::uint64_t r = 0;
      while (r < rounds) {
        const std::uint64_t roll = rng() % 1000;
        if (roll == 0) {
          int id = g.random_weight(rng);
          int l = g.list_of(id);
          // cut at the first legal boundary at or after id, if the sides stay heavy enough
          std::int64_t left = 0;
          int c = g.list_head(l);
          for (; c != id; c = g.next(c)) left += g.weight(c);
          for (; c >= 0 && g.next(c) >= 0; c = g.next(c)) {
            left += g.weight(c);
            if (left > floor && g.list_total(l) - left > floor && g.cuttable_after(c)) {
              g.cut_after(c);
              break;
            }
          }
          ++r;
          continue;
        }
        if (roll == 1) {
          int a = g.list_of(g.random_weight(rng)), b = g.list_of(g.random_weight(rng));
          if (a != b) g.concat(a, b);
          ++r;
          continue;
        }
        double total = 0;
        for (std::size_t l = 0; l < g.list_count(); ++l)
          if (g.list_alive(static_cast<int>(l))) total += double(g.list_total(static_cast<int>(l)));
        double p_inc = std::clamp(0.5 + 0.25 * (target - total) / target, 0.25, 0.75);
        int dir = double(rng() % 1000000) < p_inc * 1e6 ? 1 : -1;
        safe_update(pick_hot(3), dir);
        ++r;
      }
      break;
    }
    case GameStrategy::grow: {
      g.add_list(neutral_weights(cfg, 8, rng));
      for (std::uint64_t r = 0; r < rounds; ++r) g.update(pick_hot(2), 1);
      break;
    }
    case GameStrategy::shrink: {
      std::size_t n = std::min<std::uint64_t>(rounds / (10 * std::uint64_t(cfg.b)) + 8, 200000);
      g.add_list(neutral_weights(cfg, n, rng));
      for (std::uint64_t r = 0; r < rounds; ++r) safe_update(pick_hot(2), -1);
      break;
    }
    case GameStrategy::sawtooth: {
      g.add_list(neutral_weights(cfg, 64, rng));
      const std::uint64_t phase = 50 * std::uint64_t(cfg.b);
      int cursor = g.random_weight(rng);
      int dir = 1;
      for (std::uint64_t r = 0; r < rounds; ++r) {
        if (r % phase == 0 && r > 0) {
          dir = -dir;
          if (rng() % 4 == 0) cursor = g.random_weight(rng);
        }
        if (!g.alive(cursor)) cursor = g.random_weight(rng);
        int id = cursor;
        switch (rng() % 4) {
          case 0: id = g.prev(cursor) >= 0 ? g.prev(cursor) : cursor; break;
          case 1: id = g.next(cursor) >= 0 ? g.next(cursor) : cursor; break;
          case 2: {
            int p = g.recent_participant();
            if (p >= 0) id = p;
            break;
          }
          default: break;
        }
        safe_update(id, dir);
        if (g.alive(id)) cursor = id;
      }
      break;
    }
  }
  GameStats st = g.stats();
  return st;
}

}  // namespace xset
