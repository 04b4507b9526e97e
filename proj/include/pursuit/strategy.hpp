#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pursuit/graph.hpp"
#include "pursuit/rng.hpp"

namespace pursuit {

enum class StrategyKind {
  kDriftWalk,      // random walk with drift toward a goal node
  kPacmanRandom,   // uniform random walk
  kPacmanFlee,     // flee the nearest pursuer when it is closer than the radius
  kPacmanDotSeek,  // flee as above, otherwise drift toward the nearest dot
};

std::string to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& name);

/// One member of the hypothesised evader strategy class.
struct EvaderStrategy {
  StrategyKind kind = StrategyKind::kDriftWalk;
  std::optional<NodeId> goal;  // drift-walk only
  double drift = 0.0;          // drift-walk and dot-seek, in [0, 1]
  int flee_radius = 5;         // flee and dot-seek

  static EvaderStrategy drift_walk(NodeId goal, double drift);
  static EvaderStrategy random_walk();
  static EvaderStrategy flee(int radius);
  static EvaderStrategy dot_seek(double drift, int radius);

  /// Goal nodes on which the strategy ends the game (empty for Pac-Man kinds).
  std::vector<NodeId> goal_set() const;
  bool is_goal(NodeId n) const { return goal && *goal == n; }
  bool context_dependent() const {
    return kind == StrategyKind::kPacmanFlee || kind == StrategyKind::kPacmanDotSeek;
  }
  std::string label() const;
  void validate(const Graph& g) const;

  friend bool operator==(const EvaderStrategy&, const EvaderStrategy&) = default;
};

/// Quantities visible to both the evader and the pursuers' filter at the
/// moment the evader moves.
struct EvaderContext {
  std::span<const NodeId> pursuers;
  std::span<const NodeId> remaining_dots;
};

struct TransitionEntry {
  NodeId to;
  double prob;
};

/// Exact one-step distribution of `strategy` from `from`, one entry per
/// reachable neighbour, ascending by node id.
std::vector<TransitionEntry> transition_column(const Graph& g, const EvaderStrategy& strategy,
                                               NodeId from, const EvaderContext& ctx);

/// Dense column-stochastic matrix; at(to, from) = P(next = to | current = from).
class TransitionMatrix {
 public:
  explicit TransitionMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0.0) {}
  int size() const { return n_; }
  double at(NodeId to, NodeId from) const { return data_[index(to, from)]; }
  double& at(NodeId to, NodeId from) { return data_[index(to, from)]; }

 private:
  std::size_t index(NodeId to, NodeId from) const {
    return static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(to);
  }
  int n_;
  std::vector<double> data_;
};

TransitionMatrix transition_matrix(const Graph& g, const EvaderStrategy& strategy,
                                   const EvaderContext& ctx);

/// Samples the evader's next node by running the strategy's own sampling
/// procedure (not by inverting the column).
NodeId act(const Graph& g, const EvaderStrategy& strategy, NodeId from, const EvaderContext& ctx,
           Rng& rng);

/// Sparse transition operator for one strategy, rebuilt per context for
/// context-dependent kinds and built once otherwise.
class TransitionModel {
 public:
  TransitionModel(const Graph& g, EvaderStrategy strategy);

  const EvaderStrategy& strategy() const { return strategy_; }
  void set_context(const EvaderContext& ctx);

  std::span<const TransitionEntry> column(NodeId from) const {
    return {entries_.data() + offsets_[from], entries_.data() + offsets_[from + 1]};
  }
  template <class Gen>
  NodeId sample(NodeId from, Gen& rng) const {
    const auto col = column(from);
    double u = rng.uniform();
    for (const auto& e : col) {
      if (u < e.prob) return e.to;
      u -= e.prob;
    }
    return col.back().to;
  }

  /// out = T * in. `out` is overwritten.
  void apply(std::span<const double> in, std::span<double> out) const;

 private:
  void rebuild(const EvaderContext& ctx);

  const Graph* graph_;
  EvaderStrategy strategy_;
  std::vector<std::size_t> offsets_;
  std::vector<TransitionEntry> entries_;
};

/// Finite strategy class with a prior.
struct StrategyClass {
  std::vector<EvaderStrategy> strategies;
  std::vector<double> prior;

  /// Cartesian product of goals x drifts with a uniform prior.
  static StrategyClass drift_grid(std::span<const NodeId> goals, std::span<const double> drifts);
  static StrategyClass uniform(std::vector<EvaderStrategy> strategies);

  std::size_t size() const { return strategies.size(); }
  std::optional<std::size_t> find(const EvaderStrategy& s) const;
  void validate(const Graph& g) const;
};

}  // namespace pursuit
