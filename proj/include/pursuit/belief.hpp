#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pursuit/game.hpp"
#include "pursuit/graph.hpp"
#include "pursuit/rng.hpp"
#include "pursuit/strategy.hpp"

namespace pursuit {

/// D_t minus every node a pursuer can see minus the strategy's goal set.
/// A missing D_t means "every node". Result is sorted.
std::vector<NodeId> effective_region(const Graph& g, const std::optional<std::vector<NodeId>>& informant,
                                     std::span<const NodeId> pursuers, int vision_radius,
                                     std::span<const NodeId> goal_set);

/// Region the evader must occupy under a strategy given one observation: the
/// sighting (minus goals) when the evader was seen, the effective region otherwise.
std::vector<NodeId> observation_region(const Graph& g, const PursuerObservation& obs, int vision_radius,
                                       std::span<const NodeId> goal_set);

std::vector<double> predict(const TransitionModel& model, std::span<const double> filtered);

struct Conditioned {
  std::vector<double> filtered;  // empty when likelihood is zero
  double likelihood = 0.0;
};

/// Masks `predicted` to `region` and renormalises.
Conditioned condition(std::span<const double> predicted, std::span<const NodeId> region);

/// Normalised exp(log_likelihood) * prior, computed in log space.
/// Throws InconsistentHistory when every weighted likelihood is zero.
std::vector<double> strategy_posterior(std::span<const double> log_likelihoods, std::span<const double> prior);

enum class TruncationRule {
  /// Largest head (by descending posterior) whose mass does not exceed d; never empty.
  kHeadWithinMass,
  /// Smallest head whose mass reaches d.
  kHeadReachingMass,
};

/// Strategies kept by truncation, in descending posterior order.
std::vector<std::size_t> truncated_support(std::span<const double> posterior, double d,
                                           TruncationRule rule = TruncationRule::kHeadWithinMass);

std::size_t truncated_sample(std::span<const double> posterior, double d, Rng& rng,
                             TruncationRule rule = TruncationRule::kHeadWithinMass);

struct StrategyBelief {
  std::vector<double> predicted;  // p_t(H_{t-1})
  std::vector<double> filtered;   // p_t(H_t)
  double log_likelihood = 0.0;    // log K(H_t | strategy)
  bool alive = true;
};

/// Exact per-strategy location filter plus strategy posterior.
class BeliefState {
 public:
  BeliefState(std::shared_ptr<const Graph> graph, StrategyClass strategies, int vision_radius);

  /// Conditions the initial location prior on the time-0 observation.
  void initialize(std::span<const double> initial_prior, const PursuerObservation& obs);

  /// Predicts with each strategy's transition under `ctx` (the context the
  /// evader faced when it moved) and conditions on `obs`.
  void update(const PursuerObservation& obs, const EvaderContext& ctx);

  std::vector<double> posterior() const;
  std::size_t size() const { return beliefs_.size(); }
  const StrategyBelief& strategy_belief(std::size_t i) const { return beliefs_[i]; }
  const StrategyClass& strategies() const { return class_; }
  const TransitionModel& model(std::size_t i) const { return models_[i]; }
  const Graph& graph() const { return *graph_; }
  int vision_radius() const { return vision_radius_; }
  int t() const { return t_; }
  int resets() const { return resets_; }

 private:
  void reset_from(const PursuerObservation& obs);

  std::shared_ptr<const Graph> graph_;
  StrategyClass class_;
  int vision_radius_;
  std::vector<TransitionModel> models_;
  std::vector<StrategyBelief> beliefs_;
  int t_ = 0;
  int resets_ = 0;
};

/// Point mass at `node`.
std::vector<double> point_mass(int n, NodeId node);
/// Uniform over the nodes outside every pursuer's vision.
std::vector<double> uniform_unseen(const Graph& g, std::span<const NodeId> pursuers, int vision_radius);

}  // namespace pursuit
