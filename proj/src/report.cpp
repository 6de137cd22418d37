#include "xset/report.hpp"

#include <algorithm>

#include "xset/fks.hpp"

namespace xset {

using nlohmann::json;

json to_json(const RunStats& s, bool with_time) {
  json j;
  j["ops"] = s.ops;
  j["op_counts"] = s.op_counts;
  j["mismatches"] = s.mismatches;
  j["first_mismatch"] = s.first_mismatch_op ? json{{"op", *s.first_mismatch_op}, {"detail", s.first_mismatch}} : json(nullptr);
  j["audits"] = s.audits;
  j["audit_failures"] = s.audit_failures;
  j["audit_breakdown"] = {
      {"failed_audits", s.failed_audits},
      {"budget_violations", s.budget_violations},
      {"step_level_violations", s.step_level_violations},
      {"locality_violations", s.locality_violations},
      {"visit_violations", s.visit_violations},
      {"touch_violations", s.touch_violations},
      {"string_coverage_violations", s.string_coverage_violations},
  };
  j["first_audit_failure"] = s.first_audit_failure_op
                                 ? json{{"ops", *s.first_audit_failure_op}, {"detail", s.first_audit_failure}}
                                 : json(nullptr);
  j["finger_updates"] = s.finger_updates;
  j["max_nodes_touched_per_finger_update"] = s.max_nodes_touched_per_finger_update;
  json mp = json::object();
  for (const auto& [cls, m] : s.max_probes) mp[cls] = {{"visits", m.visits}, {"probes", m.probes}, {"hops", m.hops}};
  mp["string_search"] = {{"visits", s.max_string_visits}};
  j["max_probes"] = mp;
  j["coverage"] = {
      {"finger_searches", s.finger_searches},
      {"finger_fallbacks", s.finger_fallbacks},
      {"finger_repositions", s.finger_repositions},
      {"finger_ascents_above_1", s.finger_ascents_above_1},
      {"finger_neighbor_hits", s.finger_neighbor_hits},
      {"ladder_queries", s.ladder_queries},
      {"ladder_rung_hits", s.ladder_rung_hits},
      {"ladder_fallbacks", s.ladder_fallbacks},
  };
  j["rebalance"] = {
      {"joins", s.joins},
      {"splits", s.splits},
      {"ties", s.ties},
      {"tickets_completed", s.tickets_completed},
      {"min_budget_slack", s.min_slack},
      {"max_counter", s.max_counter},
      {"counter_picks", s.counter_picks},
  };
  j["final"] = {
      {"size", s.size},
      {"height", s.height},
      {"space_units", s.space_units},
      {"strings", s.strings},
      {"string_space_units", s.string_space_units},
  };
  if (!s.answers.empty()) j["answers"] = s.answers;
  j["ok"] = s.ok();
  if (with_time) j["wall_ms"] = s.wall_ms;
  return j;
}

json to_json(const GameStats& s) {
  return {
      {"min_weight", s.min_weight},         {"max_weight", s.max_weight},
      {"max_segment", s.max_segment},       {"splits", s.splits},
      {"joins", s.joins},                   {"ties", s.ties},
      {"rounds", s.rounds},                 {"max_join_weight", s.max_join_weight},
      {"min_split_half", s.min_split_half}, {"max_split_half", s.max_split_half},
  };
}

json to_json(const CounterStats& s) {
  return {{"p", s.p}, {"q", s.q}, {"rounds", s.rounds}, {"max_counter", s.max_counter}, {"bound", s.bound}};
}

json to_json(const AuditReport& r) {
  return {{"ok", r.ok()},       {"violations", r.violations}, {"nodes", r.nodes},
          {"elements", r.elements}, {"leaves", r.leaves},     {"height", r.height},
          {"max_approx_error_permille", r.max_approx_error}};
}

json hash_audit(std::vector<Key> keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  PerfectHash h(keys);
  unsigned worst = 0;
  for (Key k : keys) {
    unsigned p = 0;
    h.lookup(k, &p);
    worst = std::max(worst, p);
  }
  const double d = keys.empty() ? 1.0 : static_cast<double>(keys.size());
  return {{"keys", keys.size()},
          {"buckets", h.core().buckets()},
          {"cells", h.cells()},
          {"cells_per_key", static_cast<double>(h.cells()) / d},
          {"sum_sq", h.sum_sq()},
          {"collisions", h.count_collisions()},
          {"max_probes", worst},
          {"prime", h.core().prime()},
          {"words", h.words()}};
}

}  // namespace xset
