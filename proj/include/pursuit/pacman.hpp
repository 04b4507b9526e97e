#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pursuit/game.hpp"
#include "pursuit/graph.hpp"
#include "pursuit/strategy.hpp"

namespace pursuit {

/// A maze with its dot cells and spawn markers ('G' ghosts, 'P' Pac-Man).
struct MazeLayout {
  std::shared_ptr<const Graph> graph;
  std::vector<NodeId> dots;  // ascending
  std::vector<NodeId> ghost_spawns;
  std::optional<NodeId> pacman_spawn;
};

MazeLayout parse_maze_layout(std::string_view text);
MazeLayout load_maze_layout(const std::string& path);

/// The bundled classic-style maze (also shipped as data/maze_default.txt).
std::string_view default_maze_text();
const MazeLayout& default_maze();

struct PacmanOptions {
  int ghosts = 4;
  int vision_radius = 2;
  int dot_points = 10;
  int max_steps = 0;  // 0 = 20 * longer board side
  RewardConfig reward;
};

/// Pac-Man game: ghosts start on the 'G' cells, Pac-Man on 'P', every 'o'
/// cell holds a dot, and eating a dot reveals Pac-Man's position.
GameConfig pacman_config(const MazeLayout& layout, const PacmanOptions& options = {});

/// The three hypothesised Pac-Man strategies with a uniform prior:
/// random walk, flee, and flee-or-seek-dots with the given drift.
StrategyClass pacman_strategy_class(double seek_drift = 0.8, int flee_radius = 5);

/// Pac-Man's actual behaviour in the experiments: always heads for the
/// nearest dot unless a ghost is close.
EvaderStrategy pacman_true_strategy(int flee_radius = 5);

}  // namespace pursuit
