#include <doctest.h>

#include <cstdlib>

#include "xset/harness.hpp"
#include "xset/report.hpp"

using namespace xset;

TEST_CASE("workload grammar") {
  auto ops = parse_workload_string(
      "# header\n"
      "I 5\n"
      "\n"
      "I 0x10   # trailing comment\n"
      "D 5\nS 7\nL 16\nMIN\nMAX\n"
      "TAG a 16\nFS a 3\nFI a 17\n"
      "SI 61:62:ff\nSD -\nSS 0x61\n");
  REQUIRE(ops.size() == 13);
  CHECK(ops[0].op == Opcode::I);
  CHECK(ops[0].line == 2);
  CHECK(ops[1].key == 16);
  CHECK(ops[1].line == 4);
  CHECK(ops[7].tag == "a");
  CHECK(ops[10].str == std::vector<Key>{0x61, 0x62, 0xff});
  CHECK(ops[11].str.empty());
  CHECK(ops[12].str == std::vector<Key>{0x61});
  for (const auto& op : ops) CHECK(parse_workload_string(format_op(op)).front() == op);
}

TEST_CASE("parse errors name the line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_workload_string(text);
    } catch (const ParseError& e) {
      return e.line;
    }
    return 0;
  };
  CHECK(line_of("X 5\n") == 1);
  CHECK(line_of("I 5\nI\n") == 2);
  CHECK(line_of("I 5\nI 12z\n") == 2);
  CHECK(line_of("# ok\nI 99999999999999999999\n") == 2);
  CHECK(line_of("FS 5\n") == 1);
  CHECK(line_of("SI 1:zz\n") == 1);
  CHECK(line_of("SI 11111111111111111\n") == 1);
  CHECK(line_of("I 5 6\n") == 1);
}

TEST_CASE("insert then search answers from the set") {
  HarnessConfig h;
  h.record_answers = true;
  RunStats st = run_workload(parse_workload_string("I 5\nS 7\n"), h);
  REQUIRE(st.answers == std::vector<std::string>{"5"});
  CHECK(st.mismatches == 0);
  CHECK(st.ok());
  CHECK(st.op_counts["I"] == 1);
}

TEST_CASE("every opcode runs clean against the oracle") {
  HarnessConfig h;
  h.record_answers = true;
  h.check_every = 1;
  RunStats st = run_workload(parse_workload_string("S 1\nMIN\nI 10\nI 20\nI 20\nTAG f 10\nFI f 15\nFS f 19\nFS f 2\n"
                                                   "D 20\nD 21\nL 20\nL 21\nMAX\nSI 1:2\nSI 1:3\nSS 1:2:5\nSD 1:3\n"
                                                   "SD 1:3\nSS 0\n"),
                             h);
  CHECK(st.ok());
  CHECK(st.answers == std::vector<std::string>{"none", "none", "10", "15", "none", "true", "false", "20", "none", "20",
                                               "1:2", "true", "false", "none"});
  CHECK(st.finger_searches == 2);
  CHECK(st.finger_repositions == 0);
}

TEST_CASE("out of universe key is an error with the op index") {
  HarnessConfig h;
  h.set.word_bits = 8;
  CHECK_THROWS_WITH_AS(run_workload(parse_workload_string("I 1\nI 300\n"), h), doctest::Contains("op 1 (line 2)"),
                       std::runtime_error);
}

TEST_CASE("fuzz is deterministic per seed") {
  FuzzConfig f;
  f.seed = 42;
  f.ops = 20000;
  f.finger_bias = 0.3;
  f.string_bias = 0.1;
  HarnessConfig h;
  auto a = to_json(fuzz(f, h).stats, false).dump();
  auto b = to_json(fuzz(f, h).stats, false).dump();
  CHECK(a == b);
  f.seed = 43;
  CHECK(to_json(fuzz(f, h).stats, false).dump() != a);
}

TEST_CASE("finger-heavy fuzz reaches ladders and neighbor links") {
  FuzzConfig f;
  f.seed = 9;
  f.ops = 50000;
  f.finger_bias = 0.9;
  for (bool finger_mode : {false, true}) {
    HarnessConfig h;
    h.set.finger_mode = finger_mode;
    RunStats st = fuzz(f, h).stats;
    CHECK(st.ok());
    CHECK(st.ladder_rung_hits > 0);
    CHECK(st.ladder_fallbacks > 0);
    CHECK(st.finger_neighbor_hits > 0);
    CHECK(st.finger_ascents_above_1 > 0);
    if (finger_mode) CHECK(st.max_nodes_touched_per_finger_update > 0);
  }
}

TEST_CASE("a breach fails the run and is minimized") {
  FuzzConfig f;
  f.seed = 3;
  f.ops = 5000;
  HarnessConfig h;
  h.set.finger_mode = true;
  h.touch_ceiling = 0;  // any finger update breaches
  FuzzResult r = fuzz(f, h);
  CHECK_FALSE(r.stats.ok());
  CHECK(r.stats.touch_violations > 0);
  REQUIRE(r.minimized_ops.has_value());
  // the first insert is the first update
  std::vector<WorkloadOp> rec;
  fuzz(f, HarnessConfig{}, &rec);
  std::uint64_t first_update = 0;
  while (rec[first_update].op != Opcode::I && rec[first_update].op != Opcode::D) ++first_update;
  CHECK(*r.minimized_ops <= first_update + 2);
}

TEST_CASE("recorded corpus of a million ops replays clean") {
  FuzzConfig f;
  f.seed = 2024;
  f.ops = 1000000;
  f.finger_bias = 0.2;
  f.string_bias = 0.05;
  HarnessConfig h;
  h.check_every = 10000;
  std::vector<WorkloadOp> rec;
  RunStats live = fuzz(f, h, &rec).stats;
  REQUIRE(live.ok());
  std::string text;
  for (const auto& op : rec) text += format_op(op) + "\n";
  RunStats replay = run_workload(parse_workload_string(text), h);
  CHECK(replay.ops == 1000000);
  CHECK(replay.mismatches == 0);
  CHECK(replay.audit_failures == 0);
  CHECK(replay.size == live.size);
}

TEST_CASE("seed falls back to the environment") {
  ::setenv("XSET_SEED", "0x2a", 1);
  CHECK(env_seed(7) == 42);
  ::setenv("XSET_SEED", "junk", 1);
  CHECK(env_seed(7) == 7);
  ::unsetenv("XSET_SEED");
  CHECK(env_seed(7) == 7);
}

TEST_CASE("bench rows") {
  auto rows = bench({1000, 2000}, {SVariant::sorted, SVariant::veb}, 1, 1);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].variant == "sorted");
  CHECK(rows[2].variant == "veb");
  for (const auto& r : rows) CHECK(r.space_per_n > 0);
  CHECK(bench_csv_row(rows[0]).rfind("1000,sorted,", 0) == 0);
}
