#pragma once

#include <json.hpp>

#include "xset/counters.hpp"
#include "xset/game.hpp"
#include "xset/harness.hpp"

namespace xset {

nlohmann::json to_json(const RunStats& s, bool with_time = true);
nlohmann::json to_json(const GameStats& s);
nlohmann::json to_json(const CounterStats& s);
nlohmann::json to_json(const AuditReport& r);

/// Perfect-hash table statistics for a table built over the distinct keys.
nlohmann::json hash_audit(std::vector<Key> keys);

}  // namespace xset
