#include "pursuit/pacman.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pursuit/errors.hpp"
#include "pursuit/maze_default.hpp"

namespace pursuit {

MazeLayout parse_maze_layout(std::string_view text) {
  MazeLayout layout;
  auto graph = std::make_shared<Graph>(build_maze(text));
  std::istringstream in{std::string(text)};
  int row = 0;
  for (std::string line; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    for (int col = 0; col < static_cast<int>(line.size()); ++col) {
      const char ch = line[static_cast<std::size_t>(col)];
      if (ch == '#' || ch == '.') continue;
      const NodeId n = *graph->node_at(row, col);
      if (ch == 'o') layout.dots.push_back(n);
      if (ch == 'G') layout.ghost_spawns.push_back(n);
      if (ch == 'P') {
        if (layout.pacman_spawn) throw InvalidLayout("maze has more than one 'P' spawn");
        layout.pacman_spawn = n;
      }
    }
  }
  std::sort(layout.dots.begin(), layout.dots.end());
  layout.graph = std::move(graph);
  return layout;
}

MazeLayout load_maze_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open maze layout '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_maze_layout(text.str());
}

std::string_view default_maze_text() { return kDefaultMazeLayout; }

const MazeLayout& default_maze() {
  static const MazeLayout layout = parse_maze_layout(default_maze_text());
  return layout;
}

GameConfig pacman_config(const MazeLayout& layout, const PacmanOptions& options) {
  if (options.ghosts < 1) throw InvalidParameter("Pac-Man needs at least one ghost");
  if (layout.ghost_spawns.empty()) throw InvalidLayout("maze has no 'G' ghost spawn");
  if (!layout.pacman_spawn) throw InvalidLayout("maze has no 'P' Pac-Man spawn");
  if (layout.dots.empty()) throw InvalidLayout("maze has no dots");

  GameConfig c;
  c.graph = layout.graph;
  for (int k = 0; k < options.ghosts; ++k)
    c.pursuer_starts.push_back(layout.ghost_spawns[static_cast<std::size_t>(k) % layout.ghost_spawns.size()]);
  c.evader_start = *layout.pacman_spawn;
  c.vision_radius = options.vision_radius;
  c.informant.scheme = InformantScheme::kDotEvents;
  c.reward = options.reward;
  c.max_steps = options.max_steps > 0 ? options.max_steps
                                      : 20 * std::max(layout.graph->rows(), layout.graph->cols());
  c.initial_location_known = false;
  c.dots = layout.dots;
  c.dot_points = options.dot_points;
  c.validate();
  return c;
}

StrategyClass pacman_strategy_class(double seek_drift, int flee_radius) {
  return StrategyClass::uniform({EvaderStrategy::random_walk(), EvaderStrategy::flee(flee_radius),
                                 EvaderStrategy::dot_seek(seek_drift, flee_radius)});
}

EvaderStrategy pacman_true_strategy(int flee_radius) { return EvaderStrategy::dot_seek(1.0, flee_radius); }

}  // namespace pursuit
