#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pursuit/errors.hpp"
#include "pursuit/experiments.hpp"
#include "support.hpp"

using namespace pursuit;

namespace {

ExperimentSpec small_spec(AgentKind agent, int m = 5, int episodes = 20) {
  ExperimentSpec s;
  s.label = "small";
  s.game.graph = std::make_shared<const Graph>(build_grid(m));
  s.game.pursuer_starts = {0, m};
  s.game.evader_start = m * m - 1;
  s.game.goal_set = {m - 2};
  s.game.max_steps = 20 * m;
  s.game.informant.reading = ExponentialReading::kRate;
  s.agent = agent;
  s.truth = EvaderStrategy::drift_walk(m - 2, 0.75);
  s.strategies = StrategyClass::drift_grid(std::vector<NodeId>{m - 2, (m - 2) * m}, std::vector<double>{0.25, 0.75});
  s.planner.lookahead = 0;
  s.planner.rollouts_per_path = 8;
  s.episodes = episodes;
  s.master_seed = 500;
  return s;
}

std::string csv(const MetricsRow& row) {
  std::ostringstream os;
  write_metrics_csv(os, std::span<const MetricsRow>(&row, 1));
  return os.str();
}

EpisodeRecord record(Status outcome, int duration, bool shortest = false, int score = 0) {
  EpisodeRecord r;
  r.outcome = outcome;
  r.duration = duration;
  r.shortest = shortest;
  r.score = score;
  return r;
}

}  // namespace

TEST_CASE("shortest capture time examples") {
  const Graph corridor = build_maze("..........");
  const std::vector<NodeId> start{0};
  const std::vector<NodeId> adjacent{1, 1};
  CHECK(shortest_capture_time(corridor, start, adjacent) == 0);
  const std::vector<NodeId> stationary{4, 4, 4, 4, 4};
  CHECK(shortest_capture_time(corridor, start, stationary) == 3);
  const std::vector<NodeId> approaching{5, 4, 3, 3};
  CHECK(shortest_capture_time(corridor, start, approaching) == 2);
  const std::vector<NodeId> fleeing{5, 6, 7};
  CHECK(shortest_capture_time(corridor, start, fleeing) == -1);

  EpisodeLog log;
  log.outcome = Status::kCaptured;
  log.duration = 0;
  TickRecord tick;
  tick.pursuers = {0};
  tick.evader = 1;
  log.ticks.push_back(tick);
  CHECK(shortest_capture_oracle(corridor, log));
  log.duration = 4;
  for (NodeId e : {4, 4, 4, 4}) {
    tick.evader = e;
    log.ticks.push_back(tick);
  }
  log.ticks[0].evader = 4;
  CHECK_FALSE(shortest_capture_oracle(corridor, log));
  log.outcome = Status::kTimeout;
  CHECK_THROWS_AS(shortest_capture_oracle(corridor, log), InvalidParameter);
}

TEST_CASE("shortest capture time agrees with joint-path search") {
  int captured = 0;
  for (auto agent : {AgentKind::kBenchmark, AgentKind::kThompson}) {
    auto spec = small_spec(agent, 5, 100);
    spec.game.pursuer_starts = {0};
    spec.game.informant.scheme = InformantScheme::kNone;
    spec.game.vision_radius = 1;
    BatchOptions keep;
    keep.keep_logs = true;
    const auto batch = run_batch(spec, keep);
    for (const auto& log : batch.logs) {
      const auto starts = log.pursuer_starts();
      const auto traj = log.evader_trajectory();
      const int brute = testing_support::brute_force_capture_time(*spec.game.graph, starts, traj);
      CHECK(shortest_capture_time(*spec.game.graph, starts, traj) == brute);
      if (log.captured()) {
        ++captured;
        CHECK(brute >= 0);
        CHECK(brute <= log.duration);
        CHECK(shortest_capture_oracle(*spec.game.graph, log) == (brute == log.duration));
      }
    }
  }
  CHECK(captured > 50);
}

TEST_CASE("aggregate metrics") {
  const std::vector<EpisodeRecord> records{record(Status::kCaptured, 10, true, 30), record(Status::kCaptured, 14, false, 50),
                                           record(Status::kEvaderWon, 9), record(Status::kTimeout, 100)};
  const auto row = aggregate("x", records, 100, true);
  CHECK(row.episodes == 4);
  CHECK(row.c1 == 0.5);
  CHECK(row.c2 == 0.25);
  CHECK(row.t_mean == 12.0);
  CHECK(row.t_stderr == doctest::Approx(std::sqrt(8.0) / std::sqrt(2.0)));
  CHECK(*row.score_mean == 20.0);
  CHECK(row.captured == 2);
  CHECK(row.evader_won == 1);
  CHECK(row.timeouts == 1);
  CHECK(row.c2 <= row.c1);

  const std::vector<EpisodeRecord> none{record(Status::kTimeout, 100)};
  const auto empty = aggregate("y", none, 100, false);
  CHECK(std::isnan(empty.t_mean));
  CHECK_FALSE(empty.score_mean.has_value());
  CHECK(csv(empty).find(",NA,") != std::string::npos);
}

TEST_CASE("one-step cap never captures") {
  auto spec = small_spec(AgentKind::kBenchmark, 10, 10);
  spec.game.max_steps = 1;
  const auto row = run_batch(spec).metrics;
  CHECK(row.c1 == 0.0);
  CHECK(row.timeouts == 10);
}

TEST_CASE("batches are reproducible and independent of the worker count") {
  for (auto agent : {AgentKind::kBenchmark, AgentKind::kThompson}) {
    const auto spec = small_spec(agent, 6, 24);
    const auto a = run_batch(spec, {.workers = 1});
    const auto b = run_batch(spec, {.workers = 4});
    const auto c = run_batch(spec, {.workers = 3});
    CHECK(csv(a.metrics) == csv(b.metrics));
    CHECK(csv(a.metrics) == csv(c.metrics));
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].seed == spec.episode_seed(static_cast<int>(i)));
      CHECK(a.records[i].duration == b.records[i].duration);
      CHECK(a.records[i].sampled == b.records[i].sampled);
    }
    // Metrics can be recomputed from the records alone.
    CHECK(csv(aggregate(spec.label, a.records, spec.game.max_steps, false)) == csv(a.metrics));
  }
}

TEST_CASE("single-radius sweep equals a plain batch") {
  auto spec = small_spec(AgentKind::kThompson, 5, 10);
  spec.game.vision_radius = 1;
  const std::vector<int> radii{1};
  const auto rows = vision_sweep(spec, radii);
  REQUIRE(rows.size() == 1u);
  const auto plain = run_batch(spec).metrics;
  CHECK(rows[0].c1 == plain.c1);
  CHECK(rows[0].c2 == plain.c2);
  CHECK(rows[0].t_mean == plain.t_mean);
}

TEST_CASE("full vision is at least as good as partial vision") {
  auto spec = small_spec(AgentKind::kThompson, 6, 40);
  spec.planner.lookahead = 0;
  const std::vector<int> radii{0, spec.game.graph->diameter()};
  const auto rows = vision_sweep(spec, radii);
  CHECK(rows[1].c1 >= rows[0].c1);
  CHECK(rows[1].c1 >= 0.9);
}

TEST_CASE("truncation trace") {
  auto spec = small_spec(AgentKind::kThompson, 5, 10);
  spec.strategies = StrategyClass::uniform({spec.truth});
  const std::vector<double> ds{0.9, 1.0};
  for (const auto& curve : truncation_trace(spec, ds)) {
    REQUIRE_FALSE(curve.proportion.empty());
    for (std::size_t t = 0; t < curve.proportion.size(); ++t)
      if (curve.alive[t] > 0) CHECK(curve.proportion[t] == 1.0);
  }
  spec.strategies = StrategyClass::uniform({EvaderStrategy::drift_walk(0, 0.5)});
  CHECK_THROWS_AS(truncation_trace(spec, ds), InvalidParameter);
  spec.agent = AgentKind::kBenchmark;
  CHECK_THROWS_AS(truncation_trace(spec, ds), InvalidParameter);
}

TEST_CASE("alive counts shrink as episodes end") {
  auto spec = small_spec(AgentKind::kThompson, 5, 30);
  const std::vector<double> ds{0.9};
  const auto curve = truncation_trace(spec, ds).front();
  CHECK(curve.alive.front() == 30);
  for (std::size_t t = 1; t < curve.alive.size(); ++t) CHECK(curve.alive[t] <= curve.alive[t - 1]);
}

TEST_CASE("spec validation") {
  auto spec = small_spec(AgentKind::kThompson);
  spec.episodes = 0;
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  spec = small_spec(AgentKind::kThompson);
  spec.truth = EvaderStrategy::drift_walk(99, 0.5);
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  CHECK(to_string(agent_kind_from_string("benchmark")) == "benchmark");
  CHECK_THROWS_AS(agent_kind_from_string("oracle"), InvalidParameter);
}

TEST_CASE("aborted batches name the failing episode") {
  auto spec = small_spec(AgentKind::kThompson, 5, 5);
  // The only hypothesis has its goal on the evader's known start, so the
  // very first observation is impossible under it.
  spec.game.initial_location_known = true;
  spec.strategies = StrategyClass::uniform({EvaderStrategy::drift_walk(spec.game.evader_start, 1.0)});
  try {
    run_batch(spec);
    FAIL("expected the batch to abort");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("episode 0") != std::string::npos);
    CHECK(std::string(e.what()).find("seed 500") != std::string::npos);
  }
}

TEST_CASE("csv layout") {
  MetricsRow row;
  row.label = "A, bench";
  row.episodes = 3;
  row.c1 = 2.0 / 3;
  row.t_mean = 10;
  row.t_stderr = 0.5;
  row.max_steps = 200;
  const auto text = csv(row);
  CHECK(text.rfind("label,episodes,C1,T,T_se,C2,Score,Score_se,captured,evader_won,timeouts\n", 0) == 0);
  CHECK(text.find("\"A, bench\",3,0.6667,10.0000,0.5000,0.0000,NA,NA,0,0,0\n") != std::string::npos);
  CHECK(text.find("# timeout cap (max_steps): 200") != std::string::npos);
}
