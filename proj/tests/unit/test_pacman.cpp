#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "pursuit/belief.hpp"
#include "pursuit/dots.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/experiments.hpp"
#include "pursuit/pacman.hpp"
#include "support.hpp"

using namespace pursuit;

TEST_CASE("dot observations") {
  DotState prev({2, 5, 7}, 10);
  DotState next = prev;
  CHECK_FALSE(dot_observation(prev, next, 3).has_value());
  CHECK(next.eat_at(5));
  const auto seen = dot_observation(prev, next, 5);
  REQUIRE(seen.has_value());
  CHECK(*seen == std::vector<NodeId>{5});
  DotState later = next;
  CHECK_FALSE(later.eat_at(5));
  CHECK_FALSE(dot_observation(next, later, 5).has_value());
  CHECK(next.score() == 10);
  CHECK(next.remaining() == std::vector<NodeId>{2, 7});
  CHECK_THROWS_AS(DotState({1, 1}, 10), InvalidParameter);
}

TEST_CASE("transition context carries ghosts and uneaten dots") {
  DotState dots({1, 4, 9}, 10);
  dots.eat_at(4);
  const std::vector<NodeId> ghosts{3, 8};
  const auto ctx = pacman_transition_context(dots, ghosts);
  CHECK(ctx.pursuers == ghosts);
  CHECK(ctx.remaining_dots == std::vector<NodeId>{1, 9});
}

TEST_CASE("random walk ignores the context; seek follows the last dot") {
  const Graph g = build_grid(6);
  DotState a({0, 35}, 10), b({0, 35}, 10);
  b.eat_at(0);
  const std::vector<NodeId> ga{14}, gb{20, 3};
  const auto ca = pacman_transition_context(a, ga), cb = pacman_transition_context(b, gb);
  const auto ma = transition_matrix(g, EvaderStrategy::random_walk(), ca.view());
  const auto mb = transition_matrix(g, EvaderStrategy::random_walk(), cb.view());
  for (NodeId i = 0; i < 36; ++i)
    for (NodeId j = 0; j < 36; ++j) CHECK(ma.at(i, j) == mb.at(i, j));

  // One dot left at 35, ghosts far away.
  const std::vector<NodeId> far{0};
  const auto last = pacman_transition_context(b, far);
  const auto seek = EvaderStrategy::dot_seek(1.0, 2);
  for (NodeId from = 0; from < 35; ++from) {
    if (g.dist(from, 0) < 2) continue;
    for (const auto& e : transition_column(g, seek, from, last.view()))
      if (e.prob > 0.0) CHECK(g.dist(e.to, 35) == g.dist(from, 35) - 1);
  }
}

TEST_CASE("bundled maze") {
  const auto& maze = default_maze();
  CHECK(maze.graph->rows() == 31);
  CHECK(maze.graph->cols() == 28);
  CHECK(maze.ghost_spawns.size() == 4u);
  REQUIRE(maze.pacman_spawn.has_value());
  CHECK_FALSE(maze.dots.empty());
  CHECK(std::is_sorted(maze.dots.begin(), maze.dots.end()));
  CHECK(std::find(maze.dots.begin(), maze.dots.end(), *maze.pacman_spawn) == maze.dots.end());
  for (NodeId ghost : maze.ghost_spawns)
    CHECK(std::find(maze.dots.begin(), maze.dots.end(), ghost) == maze.dots.end());
  const auto config = pacman_config(maze);
  CHECK(config.num_pursuers() == 4);
  CHECK(config.pacman());
  CHECK(config.max_steps == 20 * 31);
  CHECK_FALSE(config.initial_location_known);
}

TEST_CASE("maze layout errors") {
  CHECK_THROWS_AS(parse_maze_layout("P.P\n..."), InvalidLayout);
  const auto no_ghost = parse_maze_layout("P.o");
  CHECK_THROWS_AS(pacman_config(no_ghost), InvalidLayout);
  const auto no_dots = parse_maze_layout("P.G");
  CHECK_THROWS_AS(pacman_config(no_dots), InvalidLayout);
  CHECK_THROWS_AS(load_maze_layout("/nonexistent/maze.txt"), ParseError);
  const auto tiny = parse_maze_layout("Po.\n#.#\nG.o");
  CHECK(tiny.dots.size() == 2u);
  PacmanOptions options;
  options.ghosts = 0;
  CHECK_THROWS_AS(pacman_config(tiny, options), InvalidParameter);
}

TEST_CASE("Pac-Man games end, score their dots, and keep the filter reliable") {
  const auto maze = parse_maze_layout(
      "##########\n"
      "#oooooooo#\n"
      "#o##oo##o#\n"
      "#oooPoooo#\n"
      "#o##..##o#\n"
      "#ooo.Gooo#\n"
      "##########\n");
  PacmanOptions options;
  options.ghosts = 1;
  options.vision_radius = 1;
  const auto config = pacman_config(maze, options);
  const auto cls = pacman_strategy_class(0.8, 3);
  PlannerConfig planner;
  planner.lookahead = 0;
  int statuses[4] = {0, 0, 0, 0};
  for (const auto& truth : {pacman_true_strategy(3), EvaderStrategy::flee(3), EvaderStrategy::random_walk()}) {
    // Hypotheses that contain the truth.
    auto hyps = cls;
    if (!hyps.find(truth)) {
      hyps.strategies.push_back(truth);
      hyps.prior.assign(hyps.strategies.size(), 1.0 / static_cast<double>(hyps.strategies.size()));
    }
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      ThompsonAgent agent(hyps, planner);
      const auto log = run_episode(config, agent, StrategyPolicy(truth), seed);
      ++statuses[static_cast<int>(log.outcome)];
      CHECK(log.outcome != Status::kOngoing);
      CHECK(log.duration <= config.max_steps);
      // Score counts the distinct dot cells visited.
      std::vector<NodeId> visited;
      for (NodeId e : log.evader_trajectory())
        if (std::binary_search(maze.dots.begin(), maze.dots.end(), e)) visited.push_back(e);
      std::sort(visited.begin(), visited.end());
      visited.erase(std::unique(visited.begin(), visited.end()), visited.end());
      CHECK(log.score == 10 * static_cast<int>(visited.size()));
      if (log.outcome == Status::kEvaderWon) CHECK(visited.size() == maze.dots.size());
      // The true hypothesis never loses the evader.
      CHECK(agent.belief().resets() == 0);
      const auto k = *hyps.find(truth);
      CHECK(agent.belief().strategy_belief(k).alive);
    }
  }
  CHECK(statuses[static_cast<int>(Status::kCaptured)] > 0);
}

TEST_CASE("bundled maze episodes under the experiment agents") {
  ExperimentSpec spec;
  spec.label = "pacman";
  spec.game = pacman_config(default_maze());
  spec.truth = pacman_true_strategy();
  spec.strategies = pacman_strategy_class();
  spec.planner.lookahead = 0;
  spec.episodes = 4;
  spec.master_seed = 3000;
  const auto batch = run_batch(spec, {.workers = 2});
  CHECK(batch.metrics.score_mean.has_value());
  for (const auto& r : batch.records) {
    CHECK(r.outcome != Status::kOngoing);
    CHECK(r.score % 10 == 0);
  }
  spec.agent = AgentKind::kBenchmark;
  const auto bench = run_batch(spec, {.workers = 2});
  CHECK(bench.metrics.episodes == 4);
}
