#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/errors.hpp"
#include "pursuit/game.hpp"
#include "pursuit/io.hpp"
#include "pursuit/planner.hpp"

namespace pursuit {

inline constexpr int kProtocolVersion = 1;

/// Error reported back to a client; `code` follows HTTP status semantics.
struct ProtocolError : Error {
  ProtocolError(int code, const std::string& message, Json detail = {})
      : Error(message), code(code), detail(std::move(detail)) {}
  int code;
  Json detail;
};

using SteadyClock = std::chrono::steady_clock;

struct LiveOptions {
  std::chrono::milliseconds move_deadline{30000};
  std::function<SteadyClock::time_point()> clock = [] { return SteadyClock::now(); };
  std::size_t max_sessions = 64;
};

/// One human-vs-planner game. The human controls the evader.
class Session {
 public:
  Session(std::string id, std::string mode, GameConfig config, StrategyClass hypotheses, PlannerConfig planner,
          std::uint64_t seed, SteadyClock::time_point now, std::chrono::milliseconds deadline_length);

  const std::string& id() const { return id_; }
  const std::string& mode() const { return mode_; }
  bool finished() const { return state_.status != Status::kOngoing; }

  /// Static board description plus the current tick.
  Json snapshot() const;
  std::vector<NodeId> legal_moves() const;

  /// Plays one tick with the evader moving to `node`. Returns the tick event.
  Json advance(NodeId node, SteadyClock::time_point now, bool timed_out = false);

  SteadyClock::time_point deadline() const { return deadline_; }
  std::vector<Json> events_from(std::size_t index) const { return {events_.begin() + static_cast<long>(std::min(index, events_.size())), events_.end()}; }
  std::size_t event_count() const { return events_.size(); }

  std::mutex mutex;
  std::condition_variable changed;

 private:
  Json tick_event() const;

  std::string id_;
  std::string mode_;
  GameConfig config_;
  PlannerConfig planner_;
  ThompsonAgent agent_;
  GameState state_;
  PursuerObservation obs_;
  std::optional<std::string> strategy_label_;
  double total_return_ = 0.0;
  SteadyClock::time_point deadline_;
  std::chrono::milliseconds deadline_length_;
  std::vector<Json> events_;

  friend class SessionManager;
};

/// Transport-independent protocol handler.
///
/// Requests:  {"v":1,"type":"create","mode":"grid"|"pacman","seed"?:n,"overrides"?:{...}}
///            {"v":1,"type":"move","session":id,"node":n}
///            {"v":1,"type":"state","session":id}
/// Responses: "created" (snapshot), "tick" (one event), "state" (snapshot),
///            or "error" {code, message, legal?}.
class SessionManager {
 public:
  explicit SessionManager(LiveOptions options = {});

  /// Never throws for client mistakes; they come back as "error" messages.
  Json handle(const Json& message);

  Json create(const std::string& mode, std::uint64_t seed, const Json& overrides);
  Json move(const std::string& session, NodeId node);
  Json state(const std::string& session);

  /// Applies the stay-put fallback to every session whose deadline passed.
  /// Returns how many ticks were forced.
  int expire_deadlines();

  std::shared_ptr<Session> find(const std::string& id) const;

 private:
  LiveOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Builds the board for a new session, applying client overrides.
struct SessionSetup {
  GameConfig game;
  StrategyClass hypotheses;
  PlannerConfig planner;
};
SessionSetup session_setup(const std::string& mode, const Json& overrides);

}  // namespace pursuit
