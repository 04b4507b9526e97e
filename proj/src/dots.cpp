#include "pursuit/dots.hpp"

#include <algorithm>

#include "pursuit/errors.hpp"

namespace pursuit {

DotState::DotState(std::vector<NodeId> positions, int points_per_dot)
    : positions_(std::move(positions)), points_per_dot_(points_per_dot) {
  std::sort(positions_.begin(), positions_.end());
  if (std::adjacent_find(positions_.begin(), positions_.end()) != positions_.end())
    throw InvalidParameter("duplicate dot position");
  if (points_per_dot_ < 0) throw InvalidParameter("points per dot must be nonnegative");
  eaten_.assign(positions_.size(), false);
}

std::vector<NodeId> DotState::remaining() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < positions_.size(); ++i)
    if (!eaten_[i]) out.push_back(positions_[i]);
  return out;
}

bool DotState::eat_at(NodeId n) {
  const auto it = std::lower_bound(positions_.begin(), positions_.end(), n);
  if (it == positions_.end() || *it != n) return false;
  const auto i = static_cast<std::size_t>(it - positions_.begin());
  if (eaten_[i]) return false;
  eaten_[i] = true;
  ++eaten_count_;
  return true;
}

std::optional<std::vector<NodeId>> dot_observation(const DotState& prev, const DotState& next,
                                                   NodeId evader_pos) {
  if (next.eaten_count() > prev.eaten_count()) return std::vector<NodeId>{evader_pos};
  return std::nullopt;
}

ContextData pacman_transition_context(const DotState& dots, std::span<const NodeId> ghost_positions) {
  return {std::vector<NodeId>(ghost_positions.begin(), ghost_positions.end()), dots.remaining()};
}

}  // namespace pursuit
