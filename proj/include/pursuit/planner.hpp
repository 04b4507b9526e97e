#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pursuit/belief.hpp"
#include "pursuit/game.hpp"
#include "pursuit/graph.hpp"
#include "pursuit/rng.hpp"
#include "pursuit/strategy.hpp"

namespace pursuit {

using JointAction = std::vector<NodeId>;

/// Where rollouts place the evader at the decision time.
enum class RolloutStart {
  kModalNode,    // argmax of the sampled strategy's filtered belief
  kSampledNode,  // one draw from that belief per rollout (mixture over locations)
};

struct PlannerConfig {
  int lookahead = 1;            // n; 0 means follow the coverage heuristic
  int rollouts_per_path = 32;   // s
  int rollout_horizon = 0;      // simulated ticks per rollout; 0 = 4 * board side
  double discount = 1.0;
  double truncation = 0.9;      // d
  TruncationRule truncation_rule = TruncationRule::kHeadWithinMass;
  bool rollout_informant = false;
  RolloutStart start = RolloutStart::kModalNode;
  std::size_t max_paths = 200000;

  void validate() const;
  int horizon_for(const Graph& g) const;
};

/// Inverse-distance proximity score; a pursuer already on the node scores 2.
double proximity(int distance);

/// K distinct target nodes of largest total mass, assigned to pursuers to
/// maximise the summed proximity. targets[i] belongs to pursuer i.
std::vector<NodeId> heuristic_targets(std::span<const double> mass, std::span<const NodeId> pursuers,
                                      const Graph& g);

/// Each pursuer steps to a neighbour closest to its target (ties uniform).
template <class Gen>
JointAction step_toward(const Graph& g, std::span<const NodeId> pursuers, std::span<const NodeId> targets,
                        Gen& rng) {
  JointAction out(pursuers.size());
  NodeId best[8];
  for (std::size_t i = 0; i < pursuers.size(); ++i) {
    int best_d = g.unreachable() + 1;
    std::size_t count = 0;
    for (NodeId y : g.neighbors(pursuers[i])) {
      const int d = g.dist(y, targets[i]);
      if (d < best_d) {
        best_d = d;
        count = 0;
      }
      if (d == best_d) best[count++] = y;
    }
    out[i] = best[count == 1 ? 0 : rng.index(count)];
  }
  return out;
}

/// Coverage heuristic: targets from `mass` (the next-step location
/// prediction), then one step toward each target.
template <class Gen>
JointAction heuristic_action(std::span<const double> mass, std::span<const NodeId> pursuers, const Graph& g,
                             Gen& rng) {
  const auto targets = heuristic_targets(mass, pursuers, g);
  return step_toward(g, pursuers, targets, rng);
}

/// Full-information chaser: every pursuer steps toward the evader.
template <class Gen>
JointAction benchmark_action(NodeId evader, std::span<const NodeId> pursuers, const Graph& g, Gen& rng) {
  std::vector<NodeId> targets(pursuers.size(), evader);
  return step_toward(g, pursuers, targets, rng);
}

/// Every joint move available from `pursuers`, in lexicographic order.
std::vector<JointAction> joint_actions(const Graph& g, std::span<const NodeId> pursuers);

/// Snapshot the rollouts start from: S_t as the pursuers can reconstruct it
/// under the sampled strategy.
struct RolloutRoot {
  std::vector<NodeId> pursuers;
  std::vector<double> belief;  // filtered belief of the sampled strategy
  NodeId evader = 0;           // used with RolloutStart::kModalNode
  std::vector<NodeId> remaining_dots;
  int t = 0;
};

/// Rules and parameters the simulated games follow.
struct RolloutModel {
  std::shared_ptr<const Graph> graph;
  EvaderStrategy strategy;
  int vision_radius = 2;
  RewardConfig reward;
  InformantConfig informant;
  bool pacman = false;
};

struct ActionValue {
  JointAction action;
  double value = 0.0;
};

/// Estimated values for every feasible first joint action (n >= 1), or for
/// the heuristic's own choice (n = 0, one entry with an empty action).
std::vector<ActionValue> evaluate_actions(const RolloutModel& model, const RolloutRoot& root,
                                          const PlannerConfig& config, std::uint64_t seed);

/// Q-hat for one first action: the best mean discounted return over all
/// length-n joint paths that start with `first_action`, each path scored by
/// `rollouts_per_path` simulations that follow the heuristic after the path.
double estimate_q(const RolloutModel& model, const RolloutRoot& root, const JointAction& first_action,
                  const PlannerConfig& config, std::uint64_t seed);

/// Number of joint paths a decision would enumerate.
std::size_t count_paths(const Graph& g, std::span<const NodeId> pursuers, int lookahead);

/// Thompson-sampling pursuer team.
class ThompsonAgent final : public PursuerAgent {
 public:
  ThompsonAgent(StrategyClass strategies, PlannerConfig config);

  std::string name() const override { return "thompson"; }
  void begin_episode(const GameConfig& config, const PursuerObservation& initial, std::uint64_t seed) override;
  JointAction act(const PursuerObservation& obs, const GameState* oracle) override;
  std::optional<int> last_sampled_strategy() const override { return sampled_; }

  const BeliefState& belief() const { return *belief_; }
  const std::vector<double>& last_posterior() const { return posterior_; }
  const std::vector<ActionValue>& last_values() const { return values_; }
  const PlannerConfig& config() const { return config_; }

 private:
  StrategyClass strategies_;
  PlannerConfig config_;
  std::shared_ptr<const Graph> graph_;
  GameConfig game_;
  std::optional<BeliefState> belief_;
  std::vector<NodeId> prev_dots_;
  Rng rng_;
  std::uint64_t seed_ = 0;
  std::optional<int> sampled_;
  std::vector<double> posterior_;
  std::vector<ActionValue> values_;
};

/// Experiment A benchmark: pursuers see the evader and chase it.
class BenchmarkAgent final : public PursuerAgent {
 public:
  std::string name() const override { return "benchmark"; }
  bool needs_oracle() const override { return true; }
  void begin_episode(const GameConfig& config, const PursuerObservation& initial, std::uint64_t seed) override;
  JointAction act(const PursuerObservation& obs, const GameState* oracle) override;

 private:
  std::shared_ptr<const Graph> graph_;
  Rng rng_;
};

}  // namespace pursuit
