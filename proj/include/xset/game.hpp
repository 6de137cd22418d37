#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xset/common.hpp"

namespace xset {

struct GameConfig {
  std::int64_t b = 1;
  std::int64_t mu = 21;
  std::int64_t delta = 7;
  /// Adversary postpones each cut to the last step of the split process.
  bool defer_split = false;

  std::int64_t m() const { return mu + 3; }
  std::int64_t s() const { return 2 * mu + delta + 9; }
};

enum class GameStrategy { random, grow, shrink, sawtooth };
GameStrategy parse_game_strategy(const std::string& name);
std::string game_strategy_name(GameStrategy s);

struct GameStats {
  std::int64_t min_weight = 0;
  std::int64_t max_weight = 0;
  std::int64_t max_segment = 0;
  std::uint64_t splits = 0;
  std::uint64_t joins = 0;
  std::uint64_t ties = 0;
  std::uint64_t rounds = 0;
  // in-process extremes
  std::int64_t max_join_weight = 0;
  std::int64_t min_split_half = 0;
  std::int64_t max_split_half = 0;
};

/// Raised when an adversary move breaks a precondition of the game.
struct AdversaryFault : std::logic_error {
  using std::logic_error::logic_error;
};

/// The weight game played standalone on lists of integer weights.
///
/// Every update to a weight donates one step to the process that weight is in
/// or tied to; a process finishes after b steps. Free weights follow the
/// protocol: split at s*b, join with a free neighbor at m*b, otherwise tie to
/// a busy neighbor until the weight rebounds above m*b.
class WeightGame {
 public:
  enum class State : std::uint8_t { free, tied, busy };

  explicit WeightGame(const GameConfig& cfg, std::uint64_t seed = 1);

  /// Appends a new list of free weights. Each must lie strictly in (m*b, s*b).
  int add_list(const std::vector<std::int64_t>& weights);

  /// Adds +1 or -1 to weight id. Throws AdversaryFault if the list total would
  /// drop to (mu+3)b or below.
  void update(int id, int dir);
  /// Cuts list after weight id. The boundary must be cuttable and both parts
  /// must keep total weight above (mu+3)b.
  void cut_after(int id);
  /// Appends list b to the end of list a.
  void concat(int list_a, int list_b);

  const GameStats& stats() const { return stats_; }
  std::size_t weight_count() const { return alive_.size(); }
  bool alive(int id) const { return id >= 0 && static_cast<std::size_t>(id) < w_.size() && w_[id].alive_pos >= 0; }
  std::int64_t weight(int id) const { return w_[id].w; }
  State state(int id) const { return w_[id].st; }
  int next(int id) const { return w_[id].next; }
  int prev(int id) const { return w_[id].prev; }
  int list_of(int id) const { return w_[id].list; }
  int list_head(int l) const { return lists_[l].head; }
  std::int64_t list_total(int l) const { return lists_[l].total; }
  std::size_t list_count() const { return lists_.size(); }
  bool list_alive(int l) const { return lists_[l].head >= 0; }
  /// Random live weight.
  int random_weight(std::mt19937_64& rng) const { return alive_[rng() % alive_.size()]; }
  /// A participant of the most recently opened process that is still running, or -1.
  int recent_participant() const;
  bool cuttable_after(int id) const;
  /// Weight of the maximal uncuttable run containing id.
  std::int64_t segment_weight(int id) const;
  /// Full recount of every invariant; returns violation messages.
  std::vector<std::string> audit() const;

 private:
  struct Weight {
    std::int64_t w = 0;
    int prev = -1, next = -1, list = -1;
    State st = State::free;
    int proc = -1;  // busy: own process; tied: process tied to
    int alive_pos = -1;
  };
  struct Proc {
    bool split = false;
    int a = -1, b = -1;  // participants; b = -1 for joins and uncut splits
    std::int64_t steps = 0;
    int ties[2] = {-1, -1};  // FIFO of tied weight ids
    bool done = false;
  };
  struct List {
    int head = -1;
    std::int64_t total = 0;
  };

  int new_weight(std::int64_t w, int list);
  void kill_weight(int id);
  int new_proc(bool split);
  void remove_tie(int pid, int wid);
  void untie(int id);
  void step(int pid);
  void cut_split(int pid);
  void start_join(int left, int right);
  void start_split(int id);
  void finish(int pid);
  void check(int id);
  void drain();
  void observe(int id);

  GameConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<Weight> w_;
  std::vector<int> free_ids_;
  std::vector<int> alive_;
  std::vector<Proc> procs_;
  std::vector<int> free_procs_;
  std::vector<List> lists_;
  std::vector<int> work_;
  int recent_proc_ = -1;
  GameStats stats_;
};

/// Runs one adversary strategy for the given number of rounds.
GameStats game_simulate(const GameConfig& cfg, GameStrategy strategy, std::uint64_t rounds, std::uint64_t seed);

}  // namespace xset
