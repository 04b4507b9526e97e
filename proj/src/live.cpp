#include "pursuit/live.hpp"

#include <algorithm>

#include "pursuit/errors.hpp"
#include "pursuit/pacman.hpp"

namespace pursuit {

namespace {

Json nodes(std::span<const NodeId> v) { return Json(std::vector<NodeId>(v.begin(), v.end())); }

void check_override_keys(const Json& j, std::initializer_list<std::string_view> allowed) {
  if (j.is_null()) return;
  if (!j.is_object()) throw ProtocolError(400, "overrides must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ProtocolError(400, "unknown override '" + key + "'");
  }
}

template <class T>
T override_or(const Json& j, const char* key, T fallback) {
  if (j.is_null() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError(400, std::string("override '") + key + "' has the wrong type");
  }
}

}  // namespace

SessionSetup session_setup(const std::string& mode, const Json& overrides) {
  SessionSetup s;
  try {
    if (mode == "grid") {
      check_override_keys(overrides, {"size", "vision_radius", "lookahead", "rollouts", "max_steps",
                                      "pursuer_starts", "evader_start", "goal_set"});
      const int m = override_or(overrides, "size", 10);
      if (m < 4 || m > 40) throw ProtocolError(400, "grid size must lie in [4, 40]");
      s.game.graph = std::make_shared<const Graph>(build_grid(m));
      s.game.pursuer_starts = override_or(overrides, "pursuer_starts", std::vector<NodeId>{0, m});
      s.game.evader_start = override_or(overrides, "evader_start", m * m - 1);
      const std::vector<NodeId> goals{m - 3, (m - 3) * m};
      s.game.goal_set = override_or(overrides, "goal_set", goals);
      s.game.informant.reading = ExponentialReading::kRate;
      s.game.max_steps = override_or(overrides, "max_steps", 20 * m);
      s.game.vision_radius = override_or(overrides, "vision_radius", 2);
      const std::vector<double> drifts{0.25, 0.75};
      s.hypotheses = StrategyClass::drift_grid(goals, drifts);
      s.planner.lookahead = override_or(overrides, "lookahead", 1);
    } else if (mode == "pacman") {
      check_override_keys(overrides, {"vision_radius", "lookahead", "rollouts", "max_steps", "ghosts"});
      PacmanOptions options;
      options.ghosts = override_or(overrides, "ghosts", 4);
      options.vision_radius = override_or(overrides, "vision_radius", options.vision_radius);
      options.max_steps = override_or(overrides, "max_steps", 0);
      s.game = pacman_config(default_maze(), options);
      s.hypotheses = pacman_strategy_class();
      s.planner.lookahead = override_or(overrides, "lookahead", 0);
    } else {
      throw ProtocolError(400, "unknown mode '" + mode + "' (expected grid or pacman)");
    }
    s.planner.rollouts_per_path = override_or(overrides, "rollouts", s.planner.rollouts_per_path);
    if (s.planner.lookahead > 2) throw ProtocolError(400, "live sessions support lookahead up to 2");
    s.game.validate();
    s.planner.validate();
    s.hypotheses.validate(*s.game.graph);
  } catch (const ProtocolError&) {
    throw;
  } catch (const Error& e) {
    throw ProtocolError(400, e.what());
  }
  return s;
}

Session::Session(std::string id, std::string mode, GameConfig config, StrategyClass hypotheses,
                 PlannerConfig planner, std::uint64_t seed, SteadyClock::time_point now,
                 std::chrono::milliseconds deadline_length)
    : id_(std::move(id)),
      mode_(std::move(mode)),
      config_(std::move(config)),
      planner_(planner),
      agent_(std::move(hypotheses), planner),
      state_(initial_state(config_, seed)),
      obs_(initial_observation(config_, state_)),
      deadline_(now + deadline_length),
      deadline_length_(deadline_length) {
  agent_.begin_episode(config_, obs_, derive_seed(seed, 2));
  events_.push_back(tick_event());
}

std::vector<NodeId> Session::legal_moves() const {
  if (finished()) return {};
  const auto nb = config_.graph->neighbors(state_.evader);
  return {nb.begin(), nb.end()};
}

Json Session::tick_event() const {
  Json e;
  e["v"] = kProtocolVersion;
  e["type"] = "tick";
  e["session"] = id_;
  e["t"] = state_.t;
  e["W"] = nodes(state_.pursuers);
  e["E"] = state_.evader;
  e["status"] = to_string(state_.status);
  e["reward"] = obs_.reward ? Json(*obs_.reward) : Json(nullptr);
  e["return"] = total_return_;
  e["D"] = obs_.informant_region ? nodes(*obs_.informant_region) : Json("ALL");
  e["seen"] = obs_.evader_seen_at.has_value();
  const Json snap = belief_snapshot(agent_.belief());
  e["belief"] = snap.at("marginal");
  auto posterior = Json::array();
  for (const auto& s : snap.at("strategies")) posterior.push_back({{"label", s.at("label")}, {"weight", s.at("weight")}});
  e["posterior"] = std::move(posterior);
  e["strategy_label"] = strategy_label_ ? Json(*strategy_label_) : Json(nullptr);
  std::vector<ActionValue> values = agent_.last_values();
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
  auto q = Json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(values.size(), 5); ++i)
    q.push_back({{"action", nodes(values[i].action)}, {"value", values[i].value}});
  e["q"] = std::move(q);
  e["legal"] = legal_moves();
  if (state_.dots) {
    e["dots"] = state_.dots->remaining();
    e["score"] = state_.dots->score();
  }
  return e;
}

Json Session::snapshot() const {
  const Graph& g = *config_.graph;
  Json board;
  board["rows"] = g.rows();
  board["cols"] = g.cols();
  auto cells = Json::array();
  for (NodeId n = 0; n < g.node_count(); ++n) cells.push_back({g.cell(n).row, g.cell(n).col});
  board["cells"] = std::move(cells);
  Json s;
  s["v"] = kProtocolVersion;
  s["session"] = id_;
  s["mode"] = mode_;
  s["board"] = std::move(board);
  s["goals"] = nodes(config_.goal_set);
  s["vision_radius"] = config_.vision_radius;
  s["max_steps"] = config_.max_steps;
  s["deadline_ms"] = deadline_length_.count();
  s["planner"] = to_json(planner_);
  s["tick"] = events_.back();
  return s;
}

Json Session::advance(NodeId node, SteadyClock::time_point now, bool timed_out) {
  if (finished()) throw ProtocolError(409, "game is over (" + to_string(state_.status) + ")");
  if (!config_.graph->valid(node) || !config_.graph->adjacent(state_.evader, node)) {
    Json detail;
    detail["legal"] = legal_moves();
    throw ProtocolError(422, "node " + std::to_string(node) + " is not a neighbour of " +
                                 std::to_string(state_.evader), detail);
  }
  const auto action = agent_.act(obs_, nullptr);
  if (const auto k = agent_.last_sampled_strategy())
    strategy_label_ = agent_.belief().strategies().strategies[static_cast<std::size_t>(*k)].label();
  obs_ = step(config_, state_, action, FixedMovePolicy(node));
  if (obs_.reward) total_return_ += *obs_.reward;
  deadline_ = now + deadline_length_;
  Json e = tick_event();
  if (timed_out) e["timed_out"] = true;
  events_.push_back(e);
  changed.notify_all();
  return e;
}

SessionManager::SessionManager(LiveOptions options) : options_(std::move(options)) {}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Json SessionManager::create(const std::string& mode, std::uint64_t seed, const Json& overrides) {
  auto setup = session_setup(mode, overrides);
  std::string id;
  {
    std::lock_guard lock(mutex_);
    if (sessions_.size() >= options_.max_sessions) {
      // Drop finished sessions before refusing.
      std::erase_if(sessions_, [](const auto& kv) { return kv.second->finished(); });
      if (sessions_.size() >= options_.max_sessions) throw ProtocolError(503, "too many live sessions");
    }
    id = "s" + std::to_string(next_id_++);
  }
  auto session = std::make_shared<Session>(id, mode, std::move(setup.game), std::move(setup.hypotheses),
                                           setup.planner, seed, options_.clock(), options_.move_deadline);
  Json out;
  out["v"] = kProtocolVersion;
  out["type"] = "created";
  out["session"] = id;
  out["snapshot"] = session->snapshot();
  std::lock_guard lock(mutex_);
  sessions_[id] = std::move(session);
  return out;
}

Json SessionManager::move(const std::string& id, NodeId node) {
  auto session = find(id);
  if (!session) throw ProtocolError(404, "unknown session '" + id + "'");
  std::lock_guard lock(session->mutex);
  return session->advance(node, options_.clock());
}

Json SessionManager::state(const std::string& id) {
  auto session = find(id);
  if (!session) throw ProtocolError(404, "unknown session '" + id + "'");
  std::lock_guard lock(session->mutex);
  Json out = session->snapshot();
  out["type"] = "state";
  return out;
}

int SessionManager::expire_deadlines() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, s] : sessions_) all.push_back(s);
  }
  int forced = 0;
  const auto now = options_.clock();
  for (const auto& s : all) {
    std::lock_guard lock(s->mutex);
    if (s->finished() || now < s->deadline()) continue;
    s->advance(s->state_.evader, now, true);
    ++forced;
  }
  return forced;
}

Json SessionManager::handle(const Json& message) {
  auto error = [](int code, const std::string& text, const Json& detail = {}) {
    Json e;
    e["v"] = kProtocolVersion;
    e["type"] = "error";
    e["code"] = code;
    e["message"] = text;
    if (detail.is_object())
      for (const auto& [k, v] : detail.items()) e[k] = v;
    return e;
  };
  try {
    if (!message.is_object()) return error(400, "message must be a JSON object");
    if (!message.contains("v") || !message.at("v").is_number_integer())
      return error(400, "message needs an integer protocol version 'v'");
    if (message.at("v").get<int>() != kProtocolVersion)
      return error(400, "unsupported protocol version " + message.at("v").dump());
    if (!message.contains("type") || !message.at("type").is_string()) return error(400, "message needs a 'type'");
    const auto type = message.at("type").get<std::string>();
    auto session_id = [&] {
      if (!message.contains("session") || !message.at("session").is_string())
        throw ProtocolError(400, "'" + type + "' needs a 'session' id");
      return message.at("session").get<std::string>();
    };
    if (type == "create") {
      const auto mode = message.value("mode", std::string("grid"));
      const auto seed = message.contains("seed") ? message.at("seed").get<std::uint64_t>() : std::uint64_t{0};
      return create(mode, seed, message.value("overrides", Json()));
    }
    if (type == "move") {
      if (!message.contains("node") || !message.at("node").is_number_integer())
        return error(400, "'move' needs an integer 'node'");
      return move(session_id(), message.at("node").get<NodeId>());
    }
    if (type == "state") return state(session_id());
    return error(400, "unknown message type '" + type + "'");
  } catch (const ProtocolError& e) {
    return error(e.code, e.what(), e.detail);
  } catch (const nlohmann::json::exception& e) {
    return error(400, std::string("malformed message: ") + e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

}  // namespace pursuit
