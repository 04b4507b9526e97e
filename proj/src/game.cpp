#include "pursuit/game.hpp"

#include <algorithm>
#include <cmath>

#include "pursuit/errors.hpp"

namespace pursuit {

void RewardConfig::validate() const {
  if (!(goal_penalty < step_reward))
    throw InvalidParameter("goal penalty must be worse than the step reward");
}

void InformantConfig::validate() const {
  if (!(lambda > 0.0)) throw InvalidParameter("informant lambda must be positive");
}

std::string to_string(InformantScheme s) {
  switch (s) {
    case InformantScheme::kQuadrant:
      return "quadrant";
    case InformantScheme::kNone:
      return "none";
    case InformantScheme::kDotEvents:
      return "dot-events";
  }
  return "unknown";
}

InformantScheme informant_scheme_from_string(const std::string& s) {
  if (s == "quadrant") return InformantScheme::kQuadrant;
  if (s == "none") return InformantScheme::kNone;
  if (s == "dot-events") return InformantScheme::kDotEvents;
  throw InvalidParameter("unknown informant scheme '" + s + "'");
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kOngoing:
      return "ongoing";
    case Status::kCaptured:
      return "captured";
    case Status::kEvaderWon:
      return "evader-won";
    case Status::kTimeout:
      return "timeout";
  }
  return "unknown";
}

bool GameConfig::is_goal(NodeId n) const {
  return std::find(goal_set.begin(), goal_set.end(), n) != goal_set.end();
}

void GameConfig::validate() const {
  if (!graph) throw InvalidParameter("game config has no graph");
  const Graph& g = *graph;
  if (pursuer_starts.empty()) throw InvalidParameter("need at least one pursuer");
  for (NodeId w : pursuer_starts)
    if (!g.valid(w)) throw InvalidParameter("pursuer start " + std::to_string(w) + " is not a node");
  if (!g.valid(evader_start)) throw InvalidParameter("evader start is not a node");
  for (NodeId goal : goal_set)
    if (!g.valid(goal)) throw InvalidParameter("goal " + std::to_string(goal) + " is not a node");
  if (is_goal(evader_start)) throw InvalidParameter("evader starts on a goal node");
  if (within_capture(g, pursuer_starts, evader_start))
    throw InvalidParameter("evader starts within capture distance of a pursuer");
  if (vision_radius < 0) throw InvalidParameter("vision radius must be nonnegative");
  if (!(discount > 0.0 && discount <= 1.0)) throw InvalidParameter("discount must lie in (0, 1]");
  if (max_steps < 1) throw InvalidParameter("max_steps must be positive");
  informant.validate();
  reward.validate();
  for (NodeId d : dots) {
    if (!g.valid(d)) throw InvalidParameter("dot " + std::to_string(d) + " is not a node");
    if (d == evader_start) throw InvalidParameter("dot placed on the evader start");
  }
}

bool within_capture(const Graph& g, std::span<const NodeId> pursuers, NodeId evader) {
  return std::any_of(pursuers.begin(), pursuers.end(), [&](NodeId w) { return g.dist(w, evader) <= 1; });
}

std::vector<NodeId> quadrant_of(const Graph& g, NodeId n) {
  const int row_split = (g.rows() + 1) / 2;
  const int col_split = (g.cols() + 1) / 2;
  const Cell c = g.cell(n);
  const bool low_row = c.row < row_split;
  const bool low_col = c.col < col_split;
  std::vector<NodeId> out;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const Cell cu = g.cell(u);
    if ((cu.row < row_split) == low_row && (cu.col < col_split) == low_col) out.push_back(u);
  }
  return out;
}

GameState initial_state(const GameConfig& config, std::uint64_t seed) {
  config.validate();
  GameState s;
  s.t = 0;
  s.evader = config.evader_start;
  s.pursuers = config.pursuer_starts;
  s.status = Status::kOngoing;
  if (config.pacman()) s.dots = DotState(config.dots, config.dot_points);
  s.rng = Rng(derive_seed(seed, 1));
  return s;
}

namespace {

std::optional<NodeId> seen(const GameConfig& config, const GameState& state) {
  for (NodeId w : state.pursuers)
    if (config.graph->dist(w, state.evader) <= config.vision_radius) return state.evader;
  return std::nullopt;
}

}  // namespace

PursuerObservation initial_observation(const GameConfig& config, const GameState& state) {
  PursuerObservation obs;
  obs.t = state.t;
  obs.pursuers = state.pursuers;
  obs.status = state.status;
  obs.evader_seen_at = seen(config, state);
  if (config.initial_location_known || obs.evader_seen_at)
    obs.informant_region = std::vector<NodeId>{state.evader};
  if (state.dots) obs.remaining_dots = state.dots->remaining();
  return obs;
}

std::optional<std::vector<NodeId>> draw_informant(const GameConfig& config, GameState& state) {
  state.informant_sum += state.rng.exponential_mean(config.informant.mean());
  if (state.informant_sum > static_cast<double>(state.t)) return quadrant_of(*config.graph, state.evader);
  return std::nullopt;
}

PursuerObservation step(const GameConfig& config, GameState& state, std::span<const NodeId> pursuer_action,
                        const EvaderPolicy& evader) {
  const Graph& g = *config.graph;
  if (state.status != Status::kOngoing)
    throw InvalidState("step called on a finished game (status " + to_string(state.status) + ")");
  if (pursuer_action.size() != state.pursuers.size())
    throw IllegalAction("expected " + std::to_string(state.pursuers.size()) + " pursuer moves, got " +
                        std::to_string(pursuer_action.size()));
  for (std::size_t k = 0; k < pursuer_action.size(); ++k) {
    if (!g.valid(pursuer_action[k]) || !g.adjacent(state.pursuers[k], pursuer_action[k]))
      throw IllegalAction("pursuer " + std::to_string(k) + " cannot move from " +
                          std::to_string(state.pursuers[k]) + " to " + std::to_string(pursuer_action[k]));
  }

  state.pursuers.assign(pursuer_action.begin(), pursuer_action.end());
  state.t += 1;
  bool dot_eaten = false;
  double reward = config.reward.step_reward;

  if (within_capture(g, state.pursuers, state.evader)) {
    state.status = Status::kCaptured;
    reward = config.reward.capture_reward;
  } else {
    std::vector<NodeId> remaining;
    if (state.dots) remaining = state.dots->remaining();
    const NodeId next = evader.move(g, state.evader, EvaderContext{state.pursuers, remaining}, state.rng);
    if (!g.valid(next) || !g.adjacent(state.evader, next))
      throw IllegalAction("evader cannot move from " + std::to_string(state.evader) + " to " +
                          std::to_string(next));
    state.evader = next;
    if (state.dots) dot_eaten = state.dots->eat_at(next);

    if (within_capture(g, state.pursuers, state.evader)) {
      state.status = Status::kCaptured;
      reward = config.reward.capture_reward;
    } else if (config.is_goal(state.evader) || (state.dots && state.dots->all_eaten())) {
      state.status = Status::kEvaderWon;
      reward = config.reward.goal_penalty;
    } else if (state.t >= config.max_steps) {
      state.status = Status::kTimeout;
    }
  }

  PursuerObservation obs;
  obs.t = state.t;
  obs.pursuers = state.pursuers;
  obs.reward = reward;
  obs.status = state.status;
  obs.evader_seen_at = seen(config, state);
  switch (config.informant.scheme) {
    case InformantScheme::kQuadrant:
      obs.informant_region = draw_informant(config, state);
      break;
    case InformantScheme::kDotEvents:
      if (dot_eaten) obs.informant_region = std::vector<NodeId>{state.evader};
      break;
    case InformantScheme::kNone:
      break;
  }
  if (obs.evader_seen_at) obs.informant_region = std::vector<NodeId>{state.evader};
  if (state.dots) obs.remaining_dots = state.dots->remaining();
  return obs;
}

std::vector<NodeId> EpisodeLog::evader_trajectory() const {
  std::vector<NodeId> out;
  out.reserve(ticks.size());
  for (const auto& r : ticks) out.push_back(r.evader);
  return out;
}

namespace {

TickRecord record_of(const PursuerObservation& obs, const GameState& state) {
  TickRecord r;
  r.t = obs.t;
  r.pursuers = obs.pursuers;
  r.evader = state.evader;
  r.informant_region = obs.informant_region;
  r.evader_seen_at = obs.evader_seen_at;
  r.reward = obs.reward;
  r.status = obs.status;
  return r;
}

}  // namespace

EpisodeLog run_episode(const GameConfig& config, PursuerAgent& agent, const EvaderPolicy& evader,
                       std::uint64_t seed) {
  GameState state = initial_state(config, seed);
  PursuerObservation obs = initial_observation(config, state);
  agent.begin_episode(config, obs, derive_seed(seed, 2));

  EpisodeLog log;
  log.seed = seed;
  log.ticks.push_back(record_of(obs, state));
  double discount = 1.0;
  while (state.status == Status::kOngoing) {
    const auto action = agent.act(obs, agent.needs_oracle() ? &state : nullptr);
    log.ticks.back().sampled_strategy = agent.last_sampled_strategy();
    obs = step(config, state, action, evader);
    log.ticks.push_back(record_of(obs, state));
    log.total_return += *obs.reward;
    log.discounted_return += discount * *obs.reward;
    discount *= config.discount;
  }
  log.outcome = state.status;
  log.duration = state.t;
  if (state.dots) log.score = state.dots->score();
  return log;
}

}  // namespace pursuit
