#include "pursuit/io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string_view>

#include "pursuit/errors.hpp"
#include "pursuit/pacman.hpp"

namespace pursuit {

namespace {

void check_keys(const Json& j, std::string_view what, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Json node_list(std::span<const NodeId> nodes) {
  auto a = Json::array();
  for (NodeId n : nodes) a.push_back(n);
  return a;
}

Json number_or_null(double x) { return std::isnan(x) ? Json(nullptr) : Json(x); }

}  // namespace

Json to_json(const EvaderStrategy& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  if (s.goal) j["goal"] = *s.goal;
  if (s.kind == StrategyKind::kDriftWalk || s.kind == StrategyKind::kPacmanDotSeek) j["drift"] = s.drift;
  if (s.kind == StrategyKind::kPacmanFlee || s.kind == StrategyKind::kPacmanDotSeek) j["delta"] = s.flee_radius;
  return j;
}

EvaderStrategy strategy_from_json(const Json& j) {
  check_keys(j, "strategy", {"kind", "goal", "drift", "delta"});
  if (!j.contains("kind")) throw ParseError("strategy needs a 'kind'");
  EvaderStrategy s;
  s.kind = strategy_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("goal")) s.goal = j.at("goal").get<NodeId>();
  s.drift = get_or(j, "drift", s.kind == StrategyKind::kPacmanDotSeek ? 1.0 : 0.0);
  s.flee_radius = get_or(j, "delta", 5);
  return s;
}

StrategyClass strategy_class_from_json(const Json& j) {
  check_keys(j, "hypotheses", {"goals", "drifts", "strategies", "prior"});
  if (j.contains("strategies")) {
    if (j.contains("goals") || j.contains("drifts"))
      throw ParseError("hypotheses: give either strategies or goals/drifts, not both");
    std::vector<EvaderStrategy> list;
    for (const auto& s : j.at("strategies")) list.push_back(strategy_from_json(s));
    auto c = StrategyClass::uniform(std::move(list));
    if (j.contains("prior")) c.prior = j.at("prior").get<std::vector<double>>();
    return c;
  }
  if (!j.contains("goals") || !j.contains("drifts")) throw ParseError("hypotheses need goals and drifts");
  const auto goals = j.at("goals").get<std::vector<NodeId>>();
  const auto drifts = j.at("drifts").get<std::vector<double>>();
  auto c = StrategyClass::drift_grid(goals, drifts);
  if (j.contains("prior")) c.prior = j.at("prior").get<std::vector<double>>();
  return c;
}

Json to_json(const PlannerConfig& c) {
  Json j;
  j["lookahead"] = c.lookahead;
  j["rollouts"] = c.rollouts_per_path;
  j["horizon"] = c.rollout_horizon;
  j["discount"] = c.discount;
  j["truncation"] = c.truncation;
  j["truncation_rule"] = c.truncation_rule == TruncationRule::kHeadWithinMass ? "within" : "reaching";
  j["rollout_informant"] = c.rollout_informant;
  j["rollout_start"] = c.start == RolloutStart::kModalNode ? "modal" : "sampled";
  j["max_paths"] = c.max_paths;
  return j;
}

PlannerConfig planner_from_json(const Json& j, PlannerConfig c) {
  check_keys(j, "planner", {"lookahead", "rollouts", "horizon", "discount", "truncation", "truncation_rule",
                            "rollout_informant", "rollout_start", "max_paths"});
  c.lookahead = get_or(j, "lookahead", c.lookahead);
  c.rollouts_per_path = get_or(j, "rollouts", c.rollouts_per_path);
  c.rollout_horizon = get_or(j, "horizon", c.rollout_horizon);
  c.discount = get_or(j, "discount", c.discount);
  c.truncation = get_or(j, "truncation", c.truncation);
  c.rollout_informant = get_or(j, "rollout_informant", c.rollout_informant);
  c.max_paths = get_or(j, "max_paths", c.max_paths);
  if (j.contains("truncation_rule")) {
    const auto rule = j.at("truncation_rule").get<std::string>();
    if (rule == "within") c.truncation_rule = TruncationRule::kHeadWithinMass;
    else if (rule == "reaching") c.truncation_rule = TruncationRule::kHeadReachingMass;
    else throw ParseError("truncation_rule must be 'within' or 'reaching'");
  }
  if (j.contains("rollout_start")) {
    const auto start = j.at("rollout_start").get<std::string>();
    if (start == "modal") c.start = RolloutStart::kModalNode;
    else if (start == "sampled") c.start = RolloutStart::kSampledNode;
    else throw ParseError("rollout_start must be 'modal' or 'sampled'");
  }
  c.validate();
  return c;
}

namespace {

InformantConfig informant_from_json(const Json& j, InformantConfig c) {
  check_keys(j, "informant", {"lambda", "scheme", "reading"});
  c.lambda = get_or(j, "lambda", c.lambda);
  if (j.contains("scheme")) c.scheme = informant_scheme_from_string(j.at("scheme").get<std::string>());
  if (j.contains("reading")) {
    const auto r = j.at("reading").get<std::string>();
    if (r == "mean") c.reading = ExponentialReading::kMean;
    else if (r == "rate") c.reading = ExponentialReading::kRate;
    else throw ParseError("informant reading must be 'mean' or 'rate'");
  }
  return c;
}

RewardConfig reward_from_json(const Json& j) {
  check_keys(j, "reward", {"step", "goal", "capture"});
  RewardConfig r;
  r.step_reward = get_or(j, "step", r.step_reward);
  r.goal_penalty = get_or(j, "goal", r.goal_penalty);
  r.capture_reward = get_or(j, "capture", r.capture_reward);
  return r;
}

}  // namespace

GameConfig game_from_json(const Json& j, const EvaderStrategy* truth) {
  const std::string mode = get_or<std::string>(j, "mode", "grid");
  GameConfig c;
  if (mode == "grid") {
    const int m = get_or(j, "size", 10);
    c.graph = std::make_shared<const Graph>(build_grid(m));
    c.pursuer_starts = get_or(j, "pursuer_starts", std::vector<NodeId>{0, m});
    c.evader_start = get_or(j, "evader_start", m * m - 1);
    if (j.contains("goal_set")) {
      c.goal_set = j.at("goal_set").get<std::vector<NodeId>>();
    } else if (truth) {
      c.goal_set = truth->goal_set();
    }
    c.max_steps = 20 * m;
  } else if (mode == "pacman") {
    const std::string maze = get_or<std::string>(j, "maze", "default");
    const MazeLayout layout = maze == "default" ? default_maze() : load_maze_layout(maze);
    PacmanOptions options;
    options.ghosts = get_or(j, "ghosts", options.ghosts);
    options.dot_points = get_or(j, "dot_points", options.dot_points);
    c = pacman_config(layout, options);
    if (j.contains("pursuer_starts")) c.pursuer_starts = j.at("pursuer_starts").get<std::vector<NodeId>>();
    if (j.contains("evader_start")) c.evader_start = j.at("evader_start").get<NodeId>();
  } else {
    throw ParseError("mode must be 'grid' or 'pacman', got '" + mode + "'");
  }
  c.vision_radius = get_or(j, "vision_radius", c.vision_radius);
  c.max_steps = get_or(j, "max_steps", c.max_steps);
  c.discount = get_or(j, "discount", c.discount);
  c.initial_location_known = get_or(j, "initial_location_known", c.initial_location_known);
  if (j.contains("informant")) c.informant = informant_from_json(j.at("informant"), c.informant);
  if (j.contains("reward")) c.reward = reward_from_json(j.at("reward"));
  c.validate();
  return c;
}

ExperimentSpec experiment_from_json(const Json& j) {
  check_keys(j, "experiment",
             {"label", "mode", "size", "maze", "ghosts", "dot_points", "pursuer_starts", "evader_start", "goal_set",
              "vision_radius", "max_steps", "discount", "initial_location_known", "informant", "reward", "agent",
              "truth", "hypotheses", "planner", "episodes", "seed"});
  ExperimentSpec spec;
  spec.label = get_or<std::string>(j, "label", spec.label);
  const std::string mode = get_or<std::string>(j, "mode", "grid");
  if (j.contains("truth")) {
    spec.truth = strategy_from_json(j.at("truth"));
  } else if (mode == "pacman") {
    spec.truth = pacman_true_strategy();
  } else {
    throw ParseError("experiment '" + spec.label + "' needs a 'truth' strategy");
  }
  spec.game = game_from_json(j, &spec.truth);
  spec.agent = agent_kind_from_string(get_or<std::string>(j, "agent", "thompson"));
  if (j.contains("hypotheses")) {
    spec.strategies = strategy_class_from_json(j.at("hypotheses"));
  } else if (mode == "pacman") {
    spec.strategies = pacman_strategy_class();
  } else {
    spec.strategies = StrategyClass::uniform({spec.truth});
  }
  PlannerConfig planner;
  planner.discount = spec.game.discount;
  if (mode == "pacman") planner.lookahead = 0;
  spec.planner = j.contains("planner") ? planner_from_json(j.at("planner"), planner) : planner;
  spec.episodes = get_or(j, "episodes", spec.episodes);
  spec.master_seed = get_or<std::uint64_t>(j, "seed", spec.master_seed);
  spec.validate();
  return spec;
}

std::vector<ExperimentSpec> parse_experiments(const Json& j) {
  std::vector<ExperimentSpec> out;
  const Json* list = &j;
  if (j.is_object() && j.contains("experiments")) list = &j.at("experiments");
  if (list->is_array()) {
    for (const auto& e : *list) out.push_back(experiment_from_json(e));
  } else {
    out.push_back(experiment_from_json(*list));
  }
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (out[a].label == out[b].label) throw ParseError("duplicate experiment label '" + out[a].label + "'");
  return out;
}

std::vector<ExperimentSpec> load_experiments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open experiment file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiments(j);
}

Json tick_json(const TickRecord& tick) {
  Json j;
  j["t"] = tick.t;
  j["W"] = node_list(tick.pursuers);
  j["E"] = tick.evader;
  j["D"] = tick.informant_region ? node_list(*tick.informant_region) : Json("ALL");
  j["Y"] = tick.reward ? Json(*tick.reward) : Json(nullptr);
  j["status"] = to_string(tick.status);
  if (tick.evader_seen_at) j["seen"] = *tick.evader_seen_at;
  if (tick.sampled_strategy) j["sampled"] = *tick.sampled_strategy;
  return j;
}

void write_episode_jsonl(std::ostream& out, const EpisodeLog& log) {
  for (const auto& tick : log.ticks) out << tick_json(tick).dump() << '\n';
}

Json belief_snapshot(const BeliefState& belief) {
  Json j;
  j["t"] = belief.t();
  j["resets"] = belief.resets();
  const auto posterior = belief.posterior();
  auto strategies = Json::array();
  for (std::size_t i = 0; i < belief.size(); ++i) {
    const auto& b = belief.strategy_belief(i);
    Json s;
    s["label"] = belief.strategies().strategies[i].label();
    s["weight"] = posterior[i];
    s["alive"] = b.alive;
    s["filtered"] = b.alive ? Json(b.filtered) : Json(nullptr);
    strategies.push_back(std::move(s));
  }
  j["strategies"] = std::move(strategies);
  // Posterior-weighted location marginal, for heatmaps.
  std::vector<double> marginal(static_cast<std::size_t>(belief.graph().node_count()), 0.0);
  for (std::size_t i = 0; i < belief.size(); ++i) {
    const auto& b = belief.strategy_belief(i);
    if (!b.alive) continue;
    for (std::size_t n = 0; n < marginal.size(); ++n) marginal[n] += posterior[i] * b.filtered[n];
  }
  j["marginal"] = marginal;
  return j;
}

Json to_json(const MetricsRow& row) {
  Json j;
  j["label"] = row.label;
  j["episodes"] = row.episodes;
  j["C1"] = row.c1;
  j["T"] = number_or_null(row.t_mean);
  j["T_se"] = number_or_null(row.t_stderr);
  j["C2"] = row.c2;
  j["captured"] = row.captured;
  j["evader_won"] = row.evader_won;
  j["timeouts"] = row.timeouts;
  j["max_steps"] = row.max_steps;
  if (row.score_mean) j["Score"] = number_or_null(*row.score_mean);
  if (row.score_stderr) j["Score_se"] = number_or_null(*row.score_stderr);
  return j;
}

}  // namespace pursuit
