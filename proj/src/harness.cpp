#include "xset/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <istream>
#include <sstream>

#include "xset/ladder.hpp"

namespace xset {

namespace {

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

struct OpInfo {
  const char* name;
  Opcode op;
  enum Arity { none, key, tag_key, str } arity;
};

constexpr OpInfo kOps[] = {
    {"I", Opcode::I, OpInfo::key},          {"D", Opcode::D, OpInfo::key},
    {"S", Opcode::S, OpInfo::key},          {"L", Opcode::L, OpInfo::key},
    {"MIN", Opcode::MIN, OpInfo::none},     {"MAX", Opcode::MAX, OpInfo::none},
    {"TAG", Opcode::TAG, OpInfo::tag_key},  {"FS", Opcode::FS, OpInfo::tag_key},
    {"FI", Opcode::FI, OpInfo::tag_key},    {"SI", Opcode::SI, OpInfo::str},
    {"SD", Opcode::SD, OpInfo::str},        {"SS", Opcode::SS, OpInfo::str},
};

const OpInfo& info(Opcode op) {
  for (const auto& i : kOps)
    if (i.op == op) return i;
  throw std::logic_error("unknown opcode");
}

bool parse_u64(std::string_view t, int base, Key& out) {
  if (t.empty()) return false;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out, base);
  return ec == std::errc{} && p == t.data() + t.size();
}

Key parse_key(std::string_view t, std::size_t line) {
  Key k = 0;
  const bool hex = t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X');
  if (!parse_u64(hex ? t.substr(2) : t, hex ? 16 : 10, k)) throw ParseError(line, "bad key '" + std::string(t) + "'");
  return k;
}

std::vector<Key> parse_str(std::string_view t, std::size_t line) {
  std::vector<Key> s;
  if (t == "-") return s;
  std::size_t at = 0;
  for (;;) {
    const std::size_t colon = t.find(':', at);
    std::string_view w = t.substr(at, colon == std::string_view::npos ? std::string_view::npos : colon - at);
    if (w.size() > 2 && w[0] == '0' && (w[1] == 'x' || w[1] == 'X')) w.remove_prefix(2);
    Key c = 0;
    if (w.size() > 16 || !parse_u64(w, 16, c)) throw ParseError(line, "bad string word '" + std::string(w) + "'");
    s.push_back(c);
    if (colon == std::string_view::npos) break;
    at = colon + 1;
  }
  return s;
}

bool valid_tag(std::string_view t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  });
}

std::string str_text(const std::vector<Key>& s) {
  if (s.empty()) return "-";
  std::ostringstream o;
  o << std::hex;
  for (std::size_t i = 0; i < s.size(); ++i) o << (i ? ":" : "") << s[i];
  return o.str();
}

std::string opt_text(const std::optional<Key>& k) { return k ? std::to_string(*k) : "none"; }

}  // namespace

std::string opcode_name(Opcode op) { return info(op).name; }

ParseError::ParseError(std::size_t l, const std::string& what)
    : std::runtime_error("line " + std::to_string(l) + ": " + what), line(l) {}

std::vector<WorkloadOp> parse_workload(std::istream& in) {
  std::vector<WorkloadOp> ops;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const OpInfo* oi = nullptr;
    for (const auto& i : kOps)
      if (tok[0] == i.name) oi = &i;
    if (!oi) throw ParseError(line, "unknown opcode '" + tok[0] + "'");
    const std::size_t want = oi->arity == OpInfo::none ? 1 : oi->arity == OpInfo::tag_key ? 3 : 2;
    if (tok.size() != want)
      throw ParseError(line, tok[0] + " takes " + std::to_string(want - 1) + " operand(s)");
    WorkloadOp op;
    op.op = oi->op;
    op.line = line;
    switch (oi->arity) {
      case OpInfo::none: break;
      case OpInfo::key: op.key = parse_key(tok[1], line); break;
      case OpInfo::tag_key:
        if (!valid_tag(tok[1])) throw ParseError(line, "bad tag '" + tok[1] + "'");
        op.tag = tok[1];
        op.key = parse_key(tok[2], line);
        break;
      case OpInfo::str: op.str = parse_str(tok[1], line); break;
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

std::vector<WorkloadOp> parse_workload_string(const std::string& text) {
  std::istringstream in(text);
  return parse_workload(in);
}

std::string format_op(const WorkloadOp& op) {
  const OpInfo& oi = info(op.op);
  std::string s = oi.name;
  switch (oi.arity) {
    case OpInfo::none: break;
    case OpInfo::key: s += " " + std::to_string(op.key); break;
    case OpInfo::tag_key: s += " " + op.tag + " " + std::to_string(op.key); break;
    case OpInfo::str: s += " " + str_text(op.str); break;
  }
  return s;
}

// ---------------------------------------------------------------------------

Executor::Executor(const HarnessConfig& cfg)
    : cfg_(cfg),
      set_(std::make_unique<OrderedSet>(cfg.set)),
      strs_(std::make_unique<StringSet>(cfg.strings)),
      rng_(cfg.seed ^ 0x6a09e667f3bcc909ull) {
  t0_ = now_ms();
}

Executor::~Executor() = default;

void Executor::mismatch(const std::string& what) {
  if (!st_.mismatches) {
    st_.first_mismatch_op = st_.ops;
    st_.first_mismatch = what;
  }
  ++st_.mismatches;
}

void Executor::audit_fail(std::uint64_t& counter, const std::string& what) {
  if (!st_.first_audit_failure_op) {
    // inside apply the failing op is part of the reproducing prefix
    st_.first_audit_failure_op = st_.ops + (in_apply_ ? 1 : 0);
    st_.first_audit_failure = what;
  }
  ++counter;
}

void Executor::note_probes(const std::string& cls) {
  const OpCounters& c = set_->last_op();
  ProbeMax& m = st_.max_probes[cls];
  m.visits = std::max<std::uint64_t>(m.visits, c.visits);
  m.probes = std::max<std::uint64_t>(m.probes, c.probes);
  m.hops = std::max<std::uint64_t>(m.hops, c.hops);
  if (c.visits > set_->height() + 1)
    audit_fail(st_.visit_violations, cls + " visited " + std::to_string(c.visits) + " nodes at height " +
                                         std::to_string(set_->height()));
}

std::optional<Key> Executor::oracle_pred(Key q) const {
  auto it = keys_.upper_bound(q);
  if (it == keys_.begin()) return std::nullopt;
  return std::prev(it)->first;
}

std::optional<Key> Executor::oracle_succ_strict(Key q) const {
  auto it = keys_.upper_bound(q);
  if (it == keys_.end()) return std::nullopt;
  return it->first;
}

std::optional<Key> Executor::oracle_key_at(std::uint64_t r) const {
  if (r >= keys_.size()) return std::nullopt;
  auto it = keys_.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(r));
  return it->first;
}

std::optional<Key> Executor::tag_key(const std::string& tag) const {
  auto it = tags_.find(tag);
  if (it == tags_.end() || !set_->valid(it->second)) return std::nullopt;
  return set_->key(it->second);
}

std::optional<std::vector<Key>> Executor::oracle_string_near(const std::vector<Key>& s) const {
  if (skeys_.empty()) return std::nullopt;
  auto it = skeys_.lower_bound(s);
  if (it == skeys_.end()) it = skeys_.begin();
  return it->first;
}

bool Executor::apply(const WorkloadOp& op) {
  if (st_.mismatches) return false;
  const bool chk = cfg_.check;
  ++st_.op_counts[opcode_name(op.op)];

  auto got_key = [&](const std::optional<Handle>& h) -> std::optional<Key> {
    if (!h) return std::nullopt;
    return set_->key(*h);
  };
  auto expect = [&](const std::optional<Key>& got, const std::optional<Key>& want) {
    if (cfg_.record_answers) st_.answers.push_back(opt_text(got));
    if (chk && got != want) mismatch(format_op(op) + ": got " + opt_text(got) + ", want " + opt_text(want));
  };
  auto add = [&](Key k) {
    if (chk) ++keys_[k], ++n_;
  };
  auto finger_update = [&]() {
    if (!cfg_.set.finger_mode) return;
    ++st_.finger_updates;
    const std::uint64_t t = set_->last_op().nodes_touched;
    st_.max_nodes_touched_per_finger_update = std::max(st_.max_nodes_touched_per_finger_update, t);
    if (t > cfg_.touch_ceiling)
      audit_fail(st_.touch_violations, "finger update touched " + std::to_string(t) + " nodes");
  };

  in_apply_ = true;
  try {
    switch (op.op) {
      case Opcode::I:
        set_->insert(op.key);
        add(op.key);
        finger_update();
        break;
      case Opcode::D: {
        const bool got = set_->delete_key(op.key);
        if (cfg_.record_answers) st_.answers.push_back(got ? "true" : "false");
        if (got) finger_update();
        if (chk) {
          auto it = keys_.find(op.key);
          const bool want = it != keys_.end();
          if (want && --it->second == 0) keys_.erase(it);
          if (want) --n_;
          if (got != want) mismatch(format_op(op) + ": delete returned " + (got ? "true" : "false"));
        }
        break;
      }
      case Opcode::S:
        expect(got_key(set_->search(op.key)), oracle_pred(op.key));
        note_probes("search");
        break;
      case Opcode::L: {
        auto got = got_key(set_->lookup(op.key));
        note_probes("lookup");
        expect(got, keys_.count(op.key) ? std::optional<Key>(op.key) : std::nullopt);
        break;
      }
      case Opcode::MIN:
        expect(got_key(set_->minimum()), keys_.empty() ? std::nullopt : std::optional<Key>(keys_.begin()->first));
        break;
      case Opcode::MAX:
        expect(got_key(set_->maximum()), keys_.empty() ? std::nullopt : std::optional<Key>(keys_.rbegin()->first));
        break;
      case Opcode::TAG: {
        auto h = set_->search(op.key);
        note_probes("search");
        if (h)
          tags_[op.tag] = *h;
        else
          tags_.erase(op.tag);
        expect(got_key(h), oracle_pred(op.key));
        break;
      }
      case Opcode::FS: {
        auto it = tags_.find(op.tag);
        if (it == tags_.end() || !set_->valid(it->second)) {
          ++st_.finger_fallbacks;
          expect(got_key(set_->search(op.key)), oracle_pred(op.key));
          note_probes("search");
          break;
        }
        const Handle f = it->second;
        auto h = set_->finger_search(f, op.key);
        note_probes("finger_search");
        ++st_.finger_searches;
        expect(got_key(h), oracle_pred(op.key));
        const unsigned peak = set_->last_op().peak_level;
        if (chk && peak >= 2) {
          // distinct stored keys strictly between the finger and the query
          const Key x = set_->key(f), y = op.key;
          const std::uint64_t need = ceil_div(set_->levels().capacity(peak - 1), 10);
          std::uint64_t q = 0;
          if (y > x) {
            for (auto jt = keys_.upper_bound(x); jt != keys_.end() && jt->first < y && q < need; ++jt) ++q;
          } else {
            for (auto jt = keys_.upper_bound(y); jt != keys_.end() && jt->first < x && q < need; ++jt) ++q;
          }
          if (q < need)
            audit_fail(st_.locality_violations, format_op(op) + ": peak level " + std::to_string(peak) + " with only " +
                                                    std::to_string(q) + " keys between");
        }
        break;
      }
      case Opcode::FI: {
        std::optional<Handle> f;
        auto it = tags_.find(op.tag);
        bool fits = false;
        if (it != tags_.end() && set_->valid(it->second) && set_->key(it->second) <= op.key) {
          auto nx = set_->successor(it->second);
          fits = !nx || set_->key(*nx) >= op.key;
        }
        if (fits) {
          f = it->second;
        } else {
          ++st_.finger_repositions;
          f = set_->search(op.key);
        }
        tags_[op.tag] = set_->finger_insert(f, op.key);
        add(op.key);
        finger_update();
        break;
      }
      case Opcode::SI:
        strs_->insert(op.str);
        if (chk) ++skeys_[op.str], ++sn_;
        break;
      case Opcode::SD: {
        const bool got = strs_->erase(op.str);
        if (cfg_.record_answers) st_.answers.push_back(got ? "true" : "false");
        if (chk) {
          auto it = skeys_.find(op.str);
          const bool want = it != skeys_.end();
          if (want && --it->second == 0) skeys_.erase(it);
          if (want) --sn_;
          if (got != want) mismatch(format_op(op) + ": string delete returned " + (got ? "true" : "false"));
        }
        break;
      }
      case Opcode::SS: {
        auto got = strs_->search(op.str);
        if (cfg_.record_answers) st_.answers.push_back(got ? str_text(*got) : "none");
        st_.max_string_visits = std::max(st_.max_string_visits, strs_->stats().last_visits);
        if (chk) {
          auto it = skeys_.upper_bound(op.str);
          std::optional<std::vector<Key>> want;
          if (it != skeys_.begin()) want = std::prev(it)->first;
          if (got != want)
            mismatch(format_op(op) + ": got " + (got ? str_text(*got) : "none") + ", want " +
                     (want ? str_text(*want) : "none"));
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    in_apply_ = false;
    throw std::runtime_error("op " + std::to_string(st_.ops) + (op.line ? " (line " + std::to_string(op.line) + ")" : "") +
                             " " + format_op(op) + ": " + e.what());
  }
  if (chk && (set_->size() != n_ || strs_->size() != sn_))
    mismatch(format_op(op) + ": size " + std::to_string(set_->size()) + "/" + std::to_string(strs_->size()) +
             ", want " + std::to_string(n_) + "/" + std::to_string(sn_));
  in_apply_ = false;
  ++st_.ops;
  return st_.mismatches == 0;
}

void Executor::ladder_probe() {
  if (keys_.empty()) return;
  std::vector<Key> snap;
  snap.reserve(keys_.size());
  for (const auto& [k, c] : keys_) snap.push_back(k);
  const Key x = snap[rng_() % snap.size()];
  RangeLadder lad(snap, x, cfg_.set.sstruct, cfg_.set.word_bits);
  for (int i = 0; i < 16; ++i) {
    // offsets of every magnitude so each rung and the fallback get traffic
    const unsigned bits = static_cast<unsigned>(rng_() % 65);
    const Key off = rng_() & low_mask(bits);
    const Key y = x + off < x ? kKeyMax : x + off;
    auto a = lad.query(y);
    ++st_.ladder_queries;
    if (a.rung >= 0)
      ++st_.ladder_rung_hits;
    else
      ++st_.ladder_fallbacks;
    auto it = std::upper_bound(snap.begin(), snap.end(), y);
    const std::optional<Key> want = it == snap.begin() ? std::nullopt : std::optional<Key>(*std::prev(it));
    if (a.key != want)
      mismatch("ladder at " + std::to_string(x) + " query " + std::to_string(y) + ": got " + opt_text(a.key) +
               ", want " + opt_text(want));
  }
}

void Executor::audit_point() {
  ++st_.audits;
  auto rep = set_->audit();
  if (!rep.ok()) audit_fail(st_.failed_audits, "audit: " + rep.violations.front());
  auto srep = strs_->audit();
  if (!srep.ok())
    audit_fail(st_.string_coverage_violations,
               srep.violations.empty() ? "string audit: heavy child missing from its dictionary"
                                       : "string audit: " + srep.violations.front());
  // ticket counters are cumulative inside the set
  const SetStats& ss = set_->stats();
  if (ss.budget_violations > st_.budget_violations) {
    std::uint64_t sink = 0;
    audit_fail(sink, "ticket completed below its step budget");
    st_.budget_violations = ss.budget_violations;
  }
  if (ss.step_level_violations > st_.step_level_violations) {
    std::uint64_t sink = 0;
    audit_fail(sink, "two steps charged at one level by one update");
    st_.step_level_violations = ss.step_level_violations;
  }
  if (cfg_.check && cfg_.ladder_probe) ladder_probe();
  if (!st_.first_audit_failure_op) st_.last_clean_audit_op = st_.ops;
}

RunStats Executor::finish() {
  audit_point();
  const SetStats& ss = set_->stats();
  st_.budget_violations = ss.budget_violations;
  st_.step_level_violations = ss.step_level_violations;
  st_.audit_failures = st_.failed_audits + st_.budget_violations + st_.step_level_violations +
                       st_.locality_violations + st_.visit_violations + st_.touch_violations +
                       st_.string_coverage_violations;
  st_.finger_ascents_above_1 = ss.finger_ascents_above_1;
  st_.finger_neighbor_hits = ss.finger_neighbor_hits;
  st_.joins = ss.joins;
  st_.splits = ss.splits;
  st_.ties = ss.ties;
  st_.tickets_completed = ss.tickets_completed;
  st_.min_slack = ss.tickets_completed ? ss.min_slack : 0;
  st_.max_counter = ss.max_counter;
  st_.counter_picks = ss.counter_picks;
  st_.size = set_->size();
  st_.height = set_->height();
  st_.space_units = set_->space_usage();
  st_.strings = strs_->size();
  st_.string_space_units = strs_->space_units();
  st_.max_string_visits = std::max(st_.max_string_visits, strs_->stats().max_visits);
  st_.wall_ms = now_ms() - t0_;
  return st_;
}

RunStats run_workload(const std::vector<WorkloadOp>& ops, const HarnessConfig& cfg) {
  Executor ex(cfg);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (!ex.apply(ops[i])) break;
    if (cfg.check_every && (i + 1) % cfg.check_every == 0) ex.audit_point();
  }
  return ex.finish();
}

// ---------------------------------------------------------------------------

namespace {

class Generator {
 public:
  Generator(const FuzzConfig& fz) : fz_(fz), rng_(fz.seed * 0x9e3779b97f4a7c15ull + 0x1234567) {}

  WorkloadOp next(const Executor& ex) {
    WorkloadOp op;
    const double r = real();
    if (r < fz_.string_bias) {
      string_op(op, ex);
    } else if (r < fz_.string_bias + fz_.finger_bias) {
      finger_op(op, ex);
    } else {
      const unsigned x = static_cast<unsigned>(rng_() % 40);
      if (x < 16) {
        op.op = Opcode::I;
        op.key = key(ex);
      } else if (x < 26) {
        op.op = Opcode::D;
        op.key = existing(ex);
      } else if (x < 34) {
        op.op = Opcode::S;
        op.key = key(ex);
      } else if (x < 38) {
        op.op = Opcode::L;
        op.key = existing(ex);
      } else {
        op.op = x == 38 ? Opcode::MIN : Opcode::MAX;
      }
    }
    return op;
  }

 private:
  double real() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  Key mask() const { return low_mask(fz_.key_bits); }
  Key uniform() { return rng_() & mask(); }
  // uniform, or a small step from a stored key so duplicates and dense runs occur
  Key key(const Executor& ex) {
    if (ex.oracle_size() == 0 || rng_() % 10 < 6) return uniform();
    auto p = ex.oracle_pred(uniform());
    if (!p) return uniform();
    const Key step = rng_() % 4;
    return *p + step > mask() ? *p : *p + step;
  }
  Key existing(const Executor& ex) {
    if (ex.oracle_size() == 0 || rng_() % 10 < 2) return uniform();
    auto p = ex.oracle_pred(uniform());
    if (!p) p = ex.oracle_succ_strict(0);
    if (!p) return uniform();
    return *p;
  }

  void finger_op(WorkloadOp& op, const Executor& ex) {
    op.tag = "t" + std::to_string(rng_() % 8);
    const auto kt = ex.tag_key(op.tag);
    const unsigned x = static_cast<unsigned>(rng_() % 10);
    if (x < 2 || !kt) {
      op.op = Opcode::TAG;
      op.key = key(ex);
    } else if (x < 6) {
      // insert inside the tag's gap
      op.op = Opcode::FI;
      auto nx = ex.oracle_succ_strict(*kt);
      const Key hi = nx ? *nx : std::min(mask(), *kt + 1024 < *kt ? kKeyMax : *kt + 1024);
      op.key = *kt + (hi > *kt ? rng_() % (hi - *kt + 1) : 0);
      if (op.key > mask()) op.key = *kt;
    } else {
      op.op = Opcode::FS;
      const unsigned bits = static_cast<unsigned>(rng_() % (fz_.key_bits + 1));
      const Key off = rng_() & low_mask(bits);
      if (rng_() % 2) {
        op.key = *kt + off > mask() || *kt + off < *kt ? mask() : *kt + off;
      } else {
        op.key = off > *kt ? 0 : *kt - off;
      }
    }
  }

  std::vector<Key> random_string() {
    std::vector<Key> s(1 + rng_() % 20);
    const bool small = rng_() % 2;
    for (auto& c : s) c = small ? rng_() % 5 : rng_() % 1000;
    // the all-ones word is reserved
    return s;
  }

  void string_op(WorkloadOp& op, const Executor& ex) {
    const unsigned x = static_cast<unsigned>(rng_() % 10);
    op.str = random_string();
    if (x < 5) {
      op.op = Opcode::SI;
    } else if (x < 7) {
      op.op = Opcode::SD;
      if (rng_() % 4) {
        if (auto s = ex.oracle_string_near(op.str)) op.str = *s;
      }
    } else {
      op.op = Opcode::SS;
    }
  }

  FuzzConfig fz_;
  std::mt19937_64 rng_;
};

RunStats fuzz_run(const FuzzConfig& fz, const HarnessConfig& base, std::uint64_t dense_from,
                  std::vector<WorkloadOp>* record, std::vector<Key>* keys) {
  HarnessConfig cfg = base;
  cfg.check = true;
  cfg.seed = fz.seed;
  Executor ex(cfg);
  Generator gen(fz);
  for (std::uint64_t i = 0; i < fz.ops; ++i) {
    WorkloadOp op = gen.next(ex);
    if (record) record->push_back(op);
    if (!ex.apply(op)) break;
    const bool dense = i + 1 > dense_from;
    if (dense || (cfg.check_every && (i + 1) % cfg.check_every == 0)) {
      ex.audit_point();
    }
    if (ex.stats().first_audit_failure_op) break;
  }
  RunStats st = ex.finish();
  if (keys)
    for (auto h = ex.set().minimum(); h; h = ex.set().successor(*h))
      if (keys->empty() || keys->back() != ex.set().key(*h)) keys->push_back(ex.set().key(*h));
  return st;
}

}  // namespace

FuzzResult fuzz(const FuzzConfig& fz, const HarnessConfig& cfg, std::vector<WorkloadOp>* record) {
  FuzzResult r;
  r.stats = fuzz_run(fz, cfg, ~std::uint64_t{0}, record, &r.final_keys);
  if (r.stats.ok()) return r;
  // replay with an audit after every op past the last clean audit
  RunStats again = fuzz_run(fz, cfg, r.stats.last_clean_audit_op, nullptr, nullptr);
  std::uint64_t at = again.ops;
  if (again.first_mismatch_op) at = std::min(at, *again.first_mismatch_op + 1);
  if (again.first_audit_failure_op) at = std::min(at, *again.first_audit_failure_op);
  r.minimized_ops = at;
  return r;
}

// ---------------------------------------------------------------------------

std::vector<BenchRow> bench(const std::vector<std::uint64_t>& sizes, const std::vector<SVariant>& variants,
                            unsigned repeat, std::uint64_t seed) {
  std::vector<BenchRow> rows;
  repeat = std::max(1u, repeat);
  for (SVariant v : variants) {
    for (std::uint64_t n : sizes) {
      Config c;
      c.sstruct = v;
      OrderedSet s(c);
      std::mt19937_64 rng(seed ^ (n * 0x9e3779b97f4a7c15ull));
      const double t0 = now_ms();
      for (std::uint64_t i = 0; i < n; ++i) s.insert(rng());
      BenchRow row;
      row.size = n;
      row.variant = variant_name(v);
      row.ns_insert = n ? (now_ms() - t0) * 1e6 / static_cast<double>(n) : 0;
      const std::uint64_t m = std::max<std::uint64_t>(1, std::min<std::uint64_t>(n, 100000));
      std::vector<Key> qs(m);
      for (auto& q : qs) q = rng();
      std::uint64_t probe_sum = 0;
      for (Key q : qs) {
        s.search(q);
        const OpCounters& oc = s.last_op();
        probe_sum += oc.probes;
        row.max_probes = std::max<std::uint64_t>(row.max_probes, oc.probes);
        row.max_visits = std::max<std::uint64_t>(row.max_visits, oc.visits);
      }
      row.mean_probes = static_cast<double>(probe_sum) / static_cast<double>(m);
      std::vector<double> times;
      volatile std::uint64_t sink = 0;
      for (unsigned r = 0; r < repeat; ++r) {
        const double t1 = now_ms();
        for (Key q : qs)
          if (auto h = s.search(q)) sink = sink + h->idx;
        times.push_back((now_ms() - t1) * 1e6 / static_cast<double>(m));
      }
      std::sort(times.begin(), times.end());
      row.median_ns_search = times[times.size() / 2];
      row.space_units = s.space_usage();
      row.space_per_n = n ? static_cast<double>(row.space_units) / static_cast<double>(n) : 0;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv_header() {
  return "size,variant,median_ns_per_search,ns_per_insert,mean_probes,max_probes,max_visits,space_units,space_per_n";
}

std::string bench_csv_row(const BenchRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%llu,%s,%.1f,%.1f,%.3f,%llu,%llu,%llu,%.3f", static_cast<unsigned long long>(r.size),
                r.variant.c_str(), r.median_ns_search, r.ns_insert, r.mean_probes,
                static_cast<unsigned long long>(r.max_probes), static_cast<unsigned long long>(r.max_visits),
                static_cast<unsigned long long>(r.space_units), r.space_per_n);
  return buf;
}

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* v = std::getenv("XSET_SEED");
  if (!v || !*v) return fallback;
  try {
    std::size_t used = 0;
    const std::uint64_t s = std::stoull(v, &used, 0);
    return used == std::string(v).size() ? s : fallback;
  } catch (const std::exception&) {
    return fallback;
  }
}

}  // namespace xset
