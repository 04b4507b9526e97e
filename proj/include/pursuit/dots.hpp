#pragma once

#include <optional>
#include <vector>

#include "pursuit/graph.hpp"
#include "pursuit/strategy.hpp"

namespace pursuit {

/// Pac-Man dots: positions, eaten flags and the running score.
class DotState {
 public:
  DotState() = default;
  DotState(std::vector<NodeId> positions, int points_per_dot);

  std::span<const NodeId> positions() const { return positions_; }
  bool eaten(std::size_t i) const { return eaten_[i]; }
  std::size_t eaten_count() const { return eaten_count_; }
  bool all_eaten() const { return eaten_count_ == positions_.size(); }
  int points_per_dot() const { return points_per_dot_; }
  int score() const { return static_cast<int>(eaten_count_) * points_per_dot_; }

  /// Uneaten dot nodes, ascending.
  std::vector<NodeId> remaining() const;

  /// Eats the dot at `n` if it is still present; returns whether one was eaten.
  bool eat_at(NodeId n);

 private:
  std::vector<NodeId> positions_;  // ascending, distinct
  std::vector<bool> eaten_;
  std::size_t eaten_count_ = 0;
  int points_per_dot_ = 10;
};

/// Informant region produced by the dot events of one tick: the evader's node
/// when a dot was eaten between `prev` and `next`, otherwise nullopt (all nodes).
std::optional<std::vector<NodeId>> dot_observation(const DotState& prev, const DotState& next,
                                                   NodeId evader_pos);

/// Owns the data behind an EvaderContext.
struct ContextData {
  std::vector<NodeId> pursuers;
  std::vector<NodeId> remaining_dots;

  EvaderContext view() const { return {pursuers, remaining_dots}; }
};

ContextData pacman_transition_context(const DotState& dots, std::span<const NodeId> ghost_positions);

}  // namespace pursuit
