#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/dots.hpp"
#include "pursuit/graph.hpp"
#include "pursuit/rng.hpp"
#include "pursuit/strategy.hpp"

namespace pursuit {

struct RewardConfig {
  double step_reward = -1.0;
  double goal_penalty = -100.0;
  double capture_reward = -1.0;

  void validate() const;
};

enum class InformantScheme { kQuadrant, kNone, kDotEvents };

/// How the exponential parameter is read: as the mean of each draw or as its rate.
enum class ExponentialReading { kMean, kRate };

struct InformantConfig {
  double lambda = 0.3;
  InformantScheme scheme = InformantScheme::kQuadrant;
  ExponentialReading reading = ExponentialReading::kMean;

  double mean() const { return reading == ExponentialReading::kMean ? lambda : 1.0 / lambda; }
  void validate() const;
};

std::string to_string(InformantScheme s);
InformantScheme informant_scheme_from_string(const std::string& s);

struct GameConfig {
  std::shared_ptr<const Graph> graph;
  std::vector<NodeId> pursuer_starts;
  NodeId evader_start = 0;
  std::vector<NodeId> goal_set;  // true goals; empty in Pac-Man mode
  int vision_radius = 2;
  InformantConfig informant;
  RewardConfig reward;
  double discount = 1.0;
  int max_steps = 200;
  /// Pursuers are told E_0 (D_0 = {E_0}); otherwise D_0 is every node.
  bool initial_location_known = true;
  /// Dot nodes; non-empty switches on Pac-Man dot accounting.
  std::vector<NodeId> dots;
  int dot_points = 10;

  int num_pursuers() const { return static_cast<int>(pursuer_starts.size()); }
  bool pacman() const { return !dots.empty(); }
  bool is_goal(NodeId n) const;
  void validate() const;
};

enum class Status { kOngoing, kCaptured, kEvaderWon, kTimeout };
std::string to_string(Status s);

/// Full game state S_t, including the evader's position and the game's rng.
struct GameState {
  int t = 0;
  NodeId evader = 0;
  std::vector<NodeId> pursuers;
  Status status = Status::kOngoing;
  std::optional<DotState> dots;
  double informant_sum = 0.0;
  Rng rng;
};

/// What the pursuers learn at time t.
struct PursuerObservation {
  int t = 0;
  std::vector<NodeId> pursuers;
  /// D_t, sorted; nullopt encodes "every node".
  std::optional<std::vector<NodeId>> informant_region;
  std::optional<NodeId> evader_seen_at;
  std::optional<double> reward;  // reward of the tick that led here; absent at t = 0
  Status status = Status::kOngoing;
  std::vector<NodeId> remaining_dots;
};

/// Moves the evader; implemented by strategies and by external controllers.
class EvaderPolicy {
 public:
  virtual ~EvaderPolicy() = default;
  virtual NodeId move(const Graph& g, NodeId from, const EvaderContext& ctx, Rng& rng) const = 0;
  virtual std::string label() const = 0;
};

class StrategyPolicy final : public EvaderPolicy {
 public:
  explicit StrategyPolicy(EvaderStrategy s) : strategy_(std::move(s)) {}
  NodeId move(const Graph& g, NodeId from, const EvaderContext& ctx, Rng& rng) const override {
    return act(g, strategy_, from, ctx, rng);
  }
  std::string label() const override { return strategy_.label(); }
  const EvaderStrategy& strategy() const { return strategy_; }

 private:
  EvaderStrategy strategy_;
};

/// Always moves to a fixed node (used for externally driven evaders).
class FixedMovePolicy final : public EvaderPolicy {
 public:
  explicit FixedMovePolicy(NodeId target) : target_(target) {}
  NodeId move(const Graph&, NodeId, const EvaderContext&, Rng&) const override { return target_; }
  std::string label() const override { return "external"; }

 private:
  NodeId target_;
};

bool within_capture(const Graph& g, std::span<const NodeId> pursuers, NodeId evader);

/// Quadrant of the board containing `n`; the median row/column of an odd
/// board belongs to the lower-index half.
std::vector<NodeId> quadrant_of(const Graph& g, NodeId n);

GameState initial_state(const GameConfig& config, std::uint64_t seed);
PursuerObservation initial_observation(const GameConfig& config, const GameState& state);

/// Advances the running exponential sum by one draw and returns the informant
/// region for time t (the evader's quadrant on a report, nullopt otherwise).
std::optional<std::vector<NodeId>> draw_informant(const GameConfig& config, GameState& state);

/// One tick: pursuers move, capture check, evader moves, capture check, goal
/// check, then the observation for the new time is generated.
PursuerObservation step(const GameConfig& config, GameState& state, std::span<const NodeId> pursuer_action,
                        const EvaderPolicy& evader);

/// Pursuer decision maker. `oracle` is non-null only for agents that ask for it.
class PursuerAgent {
 public:
  virtual ~PursuerAgent() = default;
  virtual std::string name() const = 0;
  virtual bool needs_oracle() const { return false; }
  virtual void begin_episode(const GameConfig& config, const PursuerObservation& initial,
                             std::uint64_t seed) = 0;
  virtual std::vector<NodeId> act(const PursuerObservation& obs, const GameState* oracle) = 0;
  /// Index of the strategy sampled for the last decision, if the agent samples.
  virtual std::optional<int> last_sampled_strategy() const { return std::nullopt; }
};

struct TickRecord {
  int t = 0;
  std::vector<NodeId> pursuers;
  NodeId evader = 0;
  std::optional<std::vector<NodeId>> informant_region;
  std::optional<NodeId> evader_seen_at;
  std::optional<double> reward;
  Status status = Status::kOngoing;
  std::optional<int> sampled_strategy;  // strategy the agent sampled when acting from this tick
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  std::vector<TickRecord> ticks;  // ticks[0] is the initial state
  Status outcome = Status::kOngoing;
  int duration = 0;  // T
  double total_return = 0.0;
  double discounted_return = 0.0;
  int score = 0;

  bool captured() const { return outcome == Status::kCaptured; }
  std::vector<NodeId> evader_trajectory() const;
  std::vector<NodeId> pursuer_starts() const { return ticks.front().pursuers; }
};

EpisodeLog run_episode(const GameConfig& config, PursuerAgent& agent, const EvaderPolicy& evader,
                       std::uint64_t seed);

}  // namespace pursuit
