#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pursuit/belief.hpp"
#include "pursuit/experiments.hpp"
#include "pursuit/game.hpp"
#include "pursuit/planner.hpp"
#include "pursuit/strategy.hpp"

namespace pursuit {

using Json = nlohmann::json;

Json to_json(const EvaderStrategy& s);
EvaderStrategy strategy_from_json(const Json& j);

/// Accepts {"goals": [...], "drifts": [...]} or {"strategies": [...], "prior": [...]}.
StrategyClass strategy_class_from_json(const Json& j);

Json to_json(const PlannerConfig& c);
/// Keys present in `j` override `base`.
PlannerConfig planner_from_json(const Json& j, PlannerConfig base = {});

/// Board, rules and start positions. Grid mode: "size", "pursuer_starts",
/// "evader_start", "goal_set". Pac-Man mode: "maze" ("default" or a path).
GameConfig game_from_json(const Json& j, const EvaderStrategy* truth = nullptr);

ExperimentSpec experiment_from_json(const Json& j);

/// A file holds one experiment object, an array, or {"experiments": [...]}.
std::vector<ExperimentSpec> load_experiments(const std::string& path);
std::vector<ExperimentSpec> parse_experiments(const Json& j);

/// One tick as a JSON object: t, W, E, D (sorted ids or "ALL"), Y, status.
Json tick_json(const TickRecord& tick);
void write_episode_jsonl(std::ostream& out, const EpisodeLog& log);

/// Strategy weights plus each live strategy's filtered location vector.
Json belief_snapshot(const BeliefState& belief);

Json to_json(const MetricsRow& row);

}  // namespace pursuit
