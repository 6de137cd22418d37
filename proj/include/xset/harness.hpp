#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "xset/common.hpp"
#include "xset/ordered_set.hpp"
#include "xset/stringset.hpp"

namespace xset {

enum class Opcode { I, D, S, L, MIN, MAX, TAG, FS, FI, SI, SD, SS };

std::string opcode_name(Opcode op);

/// One workload line. Integer ops use key, string ops use str, finger ops use tag.
struct WorkloadOp {
  Opcode op = Opcode::S;
  Key key = 0;
  std::vector<Key> str;
  std::string tag;
  std::size_t line = 0;  // 1-based source line, 0 when generated
  bool operator==(const WorkloadOp& o) const { return op == o.op && key == o.key && str == o.str && tag == o.tag; }
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, const std::string& what);
  std::size_t line;
};

/// Parses one op per line; blank lines and '#' comments are skipped.
std::vector<WorkloadOp> parse_workload(std::istream& in);
std::vector<WorkloadOp> parse_workload_string(const std::string& text);
/// Canonical text for one op; parse(format(op)) == op.
std::string format_op(const WorkloadOp& op);

struct ProbeMax {
  std::uint64_t visits = 0, probes = 0, hops = 0;
};

struct RunStats {
  std::uint64_t ops = 0;
  std::map<std::string, std::uint64_t> op_counts;
  std::uint64_t mismatches = 0;
  std::optional<std::uint64_t> first_mismatch_op;  // 0-based op index
  std::string first_mismatch;
  // audit failures is the sum of the breakdown below
  std::uint64_t audits = 0, audit_failures = 0;
  std::uint64_t failed_audits = 0, budget_violations = 0, step_level_violations = 0;
  std::uint64_t locality_violations = 0, visit_violations = 0, touch_violations = 0;
  std::uint64_t string_coverage_violations = 0;
  std::string first_audit_failure;
  std::optional<std::uint64_t> first_audit_failure_op;  // ops executed when first seen
  std::uint64_t last_clean_audit_op = 0;
  // instrumentation
  std::uint64_t finger_updates = 0, max_nodes_touched_per_finger_update = 0;
  std::map<std::string, ProbeMax> max_probes;  // per op class
  std::uint64_t max_string_visits = 0;
  std::uint64_t finger_searches = 0, finger_fallbacks = 0, finger_repositions = 0;
  std::uint64_t finger_ascents_above_1 = 0, finger_neighbor_hits = 0;
  std::uint64_t ladder_queries = 0, ladder_rung_hits = 0, ladder_fallbacks = 0;
  std::uint64_t joins = 0, splits = 0, ties = 0, tickets_completed = 0, min_slack = 0;
  std::uint64_t max_counter = 0, counter_picks = 0;
  std::uint64_t size = 0, height = 0, space_units = 0;
  std::uint64_t strings = 0, string_space_units = 0;
  std::vector<std::string> answers;  // with record_answers
  double wall_ms = 0;

  bool ok() const { return mismatches == 0 && audit_failures == 0; }
};

struct HarnessConfig {
  Config set;
  StringSetConfig strings;
  bool check = true;                 // oracle lockstep
  std::uint64_t check_every = 1000;  // full audit period, 0 disables periodic audits
  std::uint64_t touch_ceiling = 64;
  bool ladder_probe = true;          // query snapshot ladders at audit points
  std::uint64_t seed = 1;            // drives ladder snapshots
  bool record_answers = false;       // keep one answer per query op
};

/// Executes ops against the structures and, with check on, a sorted oracle.
/// Stops at the first mismatch.
class Executor {
 public:
  explicit Executor(const HarnessConfig& cfg);
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  /// Returns false once a mismatch has been recorded.
  bool apply(const WorkloadOp& op);
  /// Full audit of both structures; folds failures into the stats.
  void audit_point();
  /// Final audit plus counter collection.
  RunStats finish();

  const RunStats& stats() const { return st_; }
  std::uint64_t ops_done() const { return st_.ops; }

  // oracle views for workload generators
  std::size_t oracle_size() const { return keys_.size(); }
  std::optional<Key> oracle_pred(Key q) const;
  std::optional<Key> oracle_succ_strict(Key q) const;
  std::optional<Key> oracle_key_at(std::uint64_t r) const;  // r-th smallest distinct key, slow for large r
  std::optional<Key> tag_key(const std::string& tag) const;
  std::optional<std::vector<Key>> oracle_string_near(const std::vector<Key>& s) const;

  const OrderedSet& set() const { return *set_; }
  const StringSet& strings() const { return *strs_; }

 private:
  void mismatch(const std::string& what);
  void audit_fail(std::uint64_t& counter, const std::string& what);
  void note_probes(const std::string& cls);
  void ladder_probe();

  HarnessConfig cfg_;
  std::unique_ptr<OrderedSet> set_;
  std::unique_ptr<StringSet> strs_;
  std::map<Key, std::uint64_t> keys_;  // oracle multiset
  std::size_t n_ = 0;
  std::map<std::vector<Key>, std::uint64_t> skeys_;
  std::size_t sn_ = 0;
  std::map<std::string, Handle> tags_;
  RunStats st_;
  std::mt19937_64 rng_;
  double t0_ = 0;
  bool in_apply_ = false;
};

/// Replays a workload. Audits every check_every ops and once at the end.
RunStats run_workload(const std::vector<WorkloadOp>& ops, const HarnessConfig& cfg);

struct FuzzConfig {
  std::uint64_t seed = 1;
  std::uint64_t ops = 100000;
  double finger_bias = 0.0;   // share of TAG/FS/FI ops
  double string_bias = 0.0;   // share of SI/SD/SS ops
  unsigned key_bits = 20;     // keys are drawn below 2^key_bits (64 = full words)
};

struct FuzzResult {
  RunStats stats;
  // set when the run failed: smallest op count that reproduces with audits every op
  std::optional<std::uint64_t> minimized_ops;
  std::vector<Key> final_keys;  // distinct keys left in the set
};

/// Deterministic pseudo-random workload driven by the seed. The generator looks
/// at the oracle so finger ops land near their tags. Optionally records the ops.
FuzzResult fuzz(const FuzzConfig& fz, const HarnessConfig& cfg, std::vector<WorkloadOp>* record = nullptr);

struct BenchRow {
  std::uint64_t size = 0;
  std::string variant;
  double median_ns_search = 0, ns_insert = 0;
  double mean_probes = 0;
  std::uint64_t max_probes = 0, max_visits = 0;
  std::uint64_t space_units = 0;
  double space_per_n = 0;
};

std::vector<BenchRow> bench(const std::vector<std::uint64_t>& sizes, const std::vector<SVariant>& variants,
                            unsigned repeat, std::uint64_t seed);
std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& r);

/// Seed from XSET_SEED when set and parseable, else fallback.
std::uint64_t env_seed(std::uint64_t fallback);

}  // namespace xset
