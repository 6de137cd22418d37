// Command line front end: run, fuzz, bench, audit, game, counters.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "xset/harness.hpp"
#include "xset/report.hpp"

using namespace xset;
using nlohmann::json;

namespace {

struct Common {
  std::string sstruct = "auto";
  bool hash_audit = false;
  std::uint64_t seed = 1;
  bool finger = false;
  std::uint64_t check_every = 1000;
  std::uint64_t touch_ceiling = 64;
  bool no_ladder = false;
  bool no_time = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--sstruct", c.sstruct, "static structure: sorted, veb, fusion or auto")
      ->check(CLI::IsMember({"sorted", "veb", "fusion", "auto"}));
  sub->add_flag("--hash-audit", c.hash_audit, "append perfect-hash statistics over the final key set");
  sub->add_option("--seed", c.seed, "seed (falls back to XSET_SEED, then 1)");
  sub->add_flag("--finger", c.finger, "constant-work finger update mode");
  sub->add_option("--check-every", c.check_every, "full audit period in ops (0: only at the end)");
  sub->add_option("--touch-ceiling", c.touch_ceiling, "max nodes a finger update may touch");
  sub->add_flag("--no-ladder", c.no_ladder, "skip snapshot ladder probes at audit points");
  sub->add_flag("--no-time", c.no_time, "omit wall time so output is byte-stable");
}

HarnessConfig harness_config(const Common& c) {
  HarnessConfig h;
  h.set.sstruct = parse_variant(c.sstruct);
  h.set.finger_mode = c.finger;
  h.check_every = c.check_every;
  h.touch_ceiling = c.touch_ceiling;
  h.ladder_probe = !c.no_ladder;
  h.seed = c.seed;
  return h;
}

std::vector<Key> stored_keys(const OrderedSet& s) {
  std::vector<Key> keys;
  for (auto h = s.minimum(); h; h = s.successor(*h)) keys.push_back(s.key(*h));
  return keys;
}

std::vector<WorkloadOp> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_workload(in);
}

int emit(const json& j, bool ok) {
  std::cout << j.dump(2) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ordered set test harness"};
  app.require_subcommand(1);
  Common c;
  c.seed = env_seed(1);

  // run
  auto* run = app.add_subcommand("run", "replay a workload file");
  std::string file;
  bool check = false, answers = false;
  run->add_option("file", file, "workload file")->required();
  run->add_flag("--check", check, "compare against the sorted oracle in lockstep");
  run->add_flag("--answers", answers, "include one answer per query op");
  add_common(run, c);

  // fuzz
  auto* fz = app.add_subcommand("fuzz", "seeded random workload with oracle and audits");
  FuzzConfig fcfg;
  std::string emit_path;
  fz->add_option("--ops", fcfg.ops, "operations");
  fz->add_option("--finger-bias", fcfg.finger_bias, "share of finger ops")->check(CLI::Range(0.0, 1.0));
  fz->add_option("--string-bias", fcfg.string_bias, "share of string ops")->check(CLI::Range(0.0, 1.0));
  fz->add_option("--key-bits", fcfg.key_bits, "keys are drawn below 2^key-bits")->check(CLI::Range(1u, 64u));
  fz->add_option("--emit", emit_path, "write the generated workload to this file");
  add_common(fz, c);

  // bench
  auto* bn = app.add_subcommand("bench", "CSV timings, probes and space per size and variant");
  std::vector<std::uint64_t> sizes{1000, 10000, 100000};
  std::vector<std::string> variants{"sorted", "veb", "fusion", "auto"};
  unsigned repeat = 5;
  std::uint64_t bseed = env_seed(1);
  bn->add_option("--sizes", sizes, "set sizes")->delimiter(',');
  bn->add_option("--sstruct", variants, "variants")->delimiter(',')->check(CLI::IsMember({"sorted", "veb", "fusion", "auto"}));
  bn->add_option("--repeat", repeat, "timed search batches per row (median reported)");
  bn->add_option("--seed", bseed, "seed");

  // audit
  auto* au = app.add_subcommand("audit", "audit after every op; replays a file or a fuzz seed");
  std::string afile;
  std::uint64_t aops = 10000;
  double abias = 0.0;
  au->add_option("file", afile, "workload file (omit to fuzz)");
  au->add_option("--ops", aops, "fuzz operations when no file is given");
  au->add_option("--finger-bias", abias, "fuzz finger share when no file is given");
  add_common(au, c);

  // game
  auto* gm = app.add_subcommand("game", "standalone split/join weight game");
  GameConfig gcfg;
  std::uint64_t rounds = 1000000;
  std::string strategy = "all";
  std::uint64_t gseed = env_seed(1);
  gm->add_option("--b", gcfg.b, "latency")->check(CLI::PositiveNumber);
  gm->add_option("--mu", gcfg.mu, "mu")->check(CLI::PositiveNumber);
  gm->add_option("--delta", gcfg.delta, "split error");
  gm->add_option("--rounds", rounds, "rounds");
  gm->add_option("--strategy", strategy, "random, grow, shrink, sawtooth or all")
      ->check(CLI::IsMember({"random", "grow", "shrink", "sawtooth", "all"}));
  gm->add_flag("--defer-split", gcfg.defer_split, "adversary postpones each cut");
  gm->add_option("--seed", gseed, "seed");

  // counters
  auto* ct = app.add_subcommand("counters", "counter-picking game");
  std::uint64_t p = 64, q = 3, crounds = 10000;
  std::string cstrat = "all";
  std::uint64_t cseed = env_seed(1);
  ct->add_option("--p", p, "counters")->check(CLI::PositiveNumber);
  ct->add_option("--q", q, "increments per round")->check(CLI::PositiveNumber);
  ct->add_option("--rounds", crounds, "rounds");
  ct->add_option("--strategy", cstrat, "round-robin, single-target, random or all")
      ->check(CLI::IsMember({"round-robin", "single-target", "random", "all"}));
  ct->add_option("--seed", cseed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto ops = load(file);
      HarnessConfig h = harness_config(c);
      h.check = check;
      h.record_answers = answers;
      Executor ex(h);
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (!ex.apply(ops[i])) break;
        if (h.check_every && (i + 1) % h.check_every == 0) ex.audit_point();
      }
      RunStats st = ex.finish();
      json j = to_json(st, !c.no_time);
      if (c.hash_audit) j["hash_audit"] = hash_audit(stored_keys(ex.set()));
      if (st.first_mismatch_op) std::cerr << "mismatch at op " << *st.first_mismatch_op << ": " << st.first_mismatch << "\n";
      return emit(j, st.ok());
    }
    if (*fz) {
      fcfg.seed = c.seed;
      HarnessConfig h = harness_config(c);
      std::vector<WorkloadOp> rec;
      FuzzResult r = fuzz(fcfg, h, emit_path.empty() ? nullptr : &rec);
      if (!emit_path.empty()) {
        std::ofstream out(emit_path);
        out << "# fuzz seed " << fcfg.seed << "\n";
        for (const auto& op : rec) out << format_op(op) << "\n";
      }
      json j = to_json(r.stats, !c.no_time);
      j["seed"] = fcfg.seed;
      if (r.minimized_ops) {
        j["minimized"] = {{"seed", fcfg.seed}, {"ops", *r.minimized_ops}, {"check_every", 1}};
        std::cerr << "failure: reproduce with fuzz --seed " << fcfg.seed << " --ops " << *r.minimized_ops
                  << " --check-every 1\n";
      }
      if (c.hash_audit) j["hash_audit"] = hash_audit(r.final_keys);
      return emit(j, r.stats.ok());
    }
    if (*bn) {
      std::vector<SVariant> vs;
      for (const auto& v : variants) vs.push_back(parse_variant(v));
      std::cout << bench_csv_header() << "\n";
      for (const auto& row : bench(sizes, vs, repeat, bseed)) std::cout << bench_csv_row(row) << "\n";
      return 0;
    }
    if (*au) {
      HarnessConfig h = harness_config(c);
      h.check = true;
      h.check_every = 1;
      RunStats st;
      json j;
      if (!afile.empty()) {
        Executor ex(h);
        for (const auto& op : load(afile)) {
          if (!ex.apply(op)) break;
          ex.audit_point();
        }
        st = ex.finish();
        j = to_json(st, !c.no_time);
        j["audit"] = to_json(ex.set().audit());
        if (c.hash_audit) j["hash_audit"] = hash_audit(stored_keys(ex.set()));
      } else {
        FuzzConfig f;
        f.seed = c.seed;
        f.ops = aops;
        f.finger_bias = abias;
        FuzzResult r = fuzz(f, h);
        st = r.stats;
        j = to_json(st, !c.no_time);
        j["seed"] = f.seed;
      }
      return emit(j, st.ok());
    }
    if (*gm) {
      std::vector<GameStrategy> ss;
      if (strategy == "all")
        ss = {GameStrategy::random, GameStrategy::grow, GameStrategy::shrink, GameStrategy::sawtooth};
      else
        ss = {parse_game_strategy(strategy)};
      json out = json::array();
      bool ok = true;
      const std::int64_t b = gcfg.b, mu = gcfg.mu, d = gcfg.delta;
      for (auto s : ss) {
        GameStats st = game_simulate(gcfg, s, rounds, gseed);
        json j = to_json(st);
        j["strategy"] = game_strategy_name(s);
        j["bounds"] = {{"min_weight", mu * b}, {"max_weight", (3 * mu + d + 14) * b}, {"max_segment", (5 * mu + d + 19) * b}};
        const bool pass = st.min_weight >= mu * b && st.max_weight <= (3 * mu + d + 14) * b &&
                          st.max_segment <= (5 * mu + d + 19) * b;
        j["ok"] = pass;
        ok = ok && pass;
        out.push_back(j);
      }
      return emit(out.size() == 1 ? out[0] : out, ok);
    }
    if (*ct) {
      std::vector<CounterAdversary> as;
      if (cstrat == "all")
        as = {CounterAdversary::round_robin, CounterAdversary::single_target, CounterAdversary::random};
      else
        as = {parse_counter_adversary(cstrat)};
      json out = json::array();
      bool ok = true;
      for (auto a : as) {
        CounterStats st = counter_game(p, q, a, crounds, cseed);
        json j = to_json(st);
        j["strategy"] = counter_adversary_name(a);
        j["ok"] = st.max_counter <= st.bound;
        ok = ok && st.max_counter <= st.bound;
        out.push_back(j);
      }
      return emit(out.size() == 1 ? out[0] : out, ok);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
