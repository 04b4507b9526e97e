#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "pursuit/belief.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/game.hpp"
#include "pursuit/planner.hpp"
#include "filter_oracle.hpp"

using namespace pursuit;


TEST_CASE("effective region examples") {
  const Graph g = build_grid(10);
  const std::vector<NodeId> none;
  const std::vector<NodeId> far{0};
  CHECK(effective_region(g, std::nullopt, none, 2, none).size() == 100u);
  const std::vector<NodeId> pursuer{99}, goal{77};
  const auto q = quadrant_of(g, 99);
  const auto region = effective_region(g, q, pursuer, 1, goal);
  std::vector<NodeId> expect;
  for (NodeId n : q)
    if (n != 99 && n != 98 && n != 89 && n != 77) expect.push_back(n);
  CHECK(region == expect);
  const std::vector<NodeId> seen_only{0, 1, 10};
  CHECK(effective_region(g, seen_only, far, 1, none).empty());
}

TEST_CASE("predict examples") {
  const Graph path = build_maze("...");
  TransitionModel walk(path, EvaderStrategy::drift_walk(0, 0.0));
  const std::vector<double> at_middle{0, 1, 0};
  for (double p : predict(walk, at_middle)) CHECK(p == doctest::Approx(1.0 / 3));

  // Two steps on a 3x3 grid against explicit path enumeration.
  const Graph g = build_grid(3);
  const auto s = EvaderStrategy::drift_walk(0, 0.75);
  TransitionModel model(g, s);
  const auto two = predict(model, predict(model, point_mass(9, 8)));
  std::vector<double> brute(9, 0.0);
  for (const auto& a : transition_column(g, s, 8, {}))
    for (const auto& b : transition_column(g, s, a.to, {})) brute[static_cast<std::size_t>(b.to)] += a.prob * b.prob;
  for (int i = 0; i < 9; ++i) CHECK(two[static_cast<std::size_t>(i)] == doctest::Approx(brute[static_cast<std::size_t>(i)]).epsilon(1e-14));
}

TEST_CASE("condition examples") {
  const std::vector<double> predicted{0.2, 0.3, 0.5};
  const std::vector<NodeId> all{0, 1, 2}, tail{1, 2}, one{2}, empty{};
  auto c = condition(predicted, all);
  CHECK(c.likelihood == doctest::Approx(1.0));
  CHECK(c.filtered[1] == doctest::Approx(0.3));
  c = condition(predicted, tail);
  CHECK(c.likelihood == doctest::Approx(0.8));
  CHECK(c.filtered[0] == 0.0);
  CHECK(c.filtered[1] == doctest::Approx(0.375));
  CHECK(c.filtered[2] == doctest::Approx(0.625));
  c = condition(predicted, one);
  CHECK(c.likelihood == doctest::Approx(0.5));
  CHECK(c.filtered == std::vector<double>{0, 0, 1});
  c = condition(predicted, empty);
  CHECK(c.likelihood == 0.0);
  CHECK(c.filtered.empty());
}

TEST_CASE("posterior examples") {
  auto graph = std::make_shared<const Graph>(build_maze("....."));
  const auto cls = StrategyClass::uniform({EvaderStrategy::drift_walk(0, 1.0), EvaderStrategy::drift_walk(4, 1.0)});
  BeliefState belief(graph, cls, 0);
  PursuerObservation obs;
  obs.pursuers = {};
  obs.informant_region = std::vector<NodeId>{2};
  belief.initialize(point_mass(5, 2), obs);
  auto post = belief.posterior();
  CHECK(post[0] == doctest::Approx(0.5));
  CHECK(post[1] == doctest::Approx(0.5));
  obs.t = 1;
  obs.evader_seen_at = 3;
  obs.informant_region = std::vector<NodeId>{3};
  belief.update(obs, {});
  post = belief.posterior();
  CHECK(post[0] == 0.0);
  CHECK(post[1] == 1.0);
  CHECK_FALSE(belief.strategy_belief(0).alive);
}

TEST_CASE("posterior in log space and its errors") {
  const std::vector<double> logs{-2000.0, -2001.0}, prior{0.5, 0.5};
  const auto p = strategy_posterior(logs, prior);
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> dead{ninf, ninf};
  CHECK_THROWS_AS(strategy_posterior(dead, prior), InconsistentHistory);
}

TEST_CASE("truncation examples") {
  Rng rng(8);
  const std::vector<double> peaked{0.95, 0.04, 0.01};
  for (int i = 0; i < 1000; ++i) CHECK(truncated_sample(peaked, 0.9, rng) == 0u);

  const std::vector<double> spread{0.5, 0.3, 0.2};
  CHECK(truncated_support(spread, 0.9) == std::vector<std::size_t>{0, 1});
  CHECK(truncated_support(spread, 0.9, TruncationRule::kHeadReachingMass) == std::vector<std::size_t>{0, 1, 2});
  const int draws = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < draws; ++i) ++counts[truncated_sample(spread, 0.9, rng)];
  CHECK(counts[2] == 0);
  CHECK(std::abs(counts[0] / double(draws) - 0.625) < 0.01);

  const std::vector<double> flat(5, 0.2);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < draws; ++i) ++hits[truncated_sample(flat, 1.0, rng)];
  for (int h : hits) CHECK(std::abs(h / double(draws) - 0.2) < 0.02 * 0.2 * 5);

  const std::vector<double> mode_second{0.3, 0.4, 0.3};
  for (int i = 0; i < 100; ++i) CHECK(truncated_sample(mode_second, 1e-9, rng) == 1u);
  CHECK_THROWS_AS(truncated_support(spread, 0.0), InvalidParameter);
  CHECK_THROWS_AS(truncated_support(spread, 1.5), InvalidParameter);
}

TEST_CASE("tied strategies are kept or dropped together") {
  const std::vector<double> tie{0.25, 0.25, 0.25, 0.25};
  CHECK(truncated_support(tie, 0.9).size() == 4u);
  const std::vector<double> head_tie{0.4, 0.4, 0.2};
  CHECK(truncated_support(head_tie, 0.5).size() == 2u);
}

TEST_CASE("initial posterior equals the prior when every strategy is consistent") {
  auto graph = std::make_shared<const Graph>(build_grid(10));
  StrategyClass cls = StrategyClass::drift_grid(std::vector<NodeId>{7, 70}, std::vector<double>{0.25, 0.75});
  cls.prior = {0.1, 0.2, 0.3, 0.4};
  BeliefState belief(graph, cls, 2);
  PursuerObservation obs;
  obs.pursuers = {0, 10};
  obs.informant_region = std::vector<NodeId>{99};
  belief.initialize(point_mass(100, 99), obs);
  const auto post = belief.posterior();
  for (std::size_t i = 0; i < 4; ++i) CHECK(post[i] == doctest::Approx(cls.prior[i]).epsilon(1e-14));
}

TEST_CASE("filter matches exhaustive trajectory enumeration") {
  const auto r = testing_support::compare_filter_with_enumeration(3000, 2024);
  CHECK(r.max_error < 1e-12);
  CHECK(r.alive_mismatches == 0);
  CHECK(r.resets == 0);
  CHECK(r.ticks > 5000);
  CHECK(r.longest == 5);  // the sixth tick is the timeout
  CHECK(r.largest_class == 3u);
}

TEST_CASE("beliefs do not depend on the pursuers' decision rule") {
  for (std::uint64_t seed : {17, 18, 19}) {
    const auto r = testing_support::filter_independent_of_pursuer_policy(seed);
    CHECK(r.ticks > 3);
    CHECK(r.differences == 0);
  }
}

TEST_CASE("a history no strategy explains triggers a reset") {
  auto graph = std::make_shared<const Graph>(build_maze("......."));
  const auto cls = StrategyClass::uniform({EvaderStrategy::drift_walk(0, 1.0), EvaderStrategy::drift_walk(6, 1.0)});
  BeliefState belief(graph, cls, 0);
  PursuerObservation obs;
  obs.informant_region = std::vector<NodeId>{3};
  belief.initialize(point_mass(7, 3), obs);
  obs.t = 1;
  obs.informant_region = std::vector<NodeId>{3};  // neither strategy stays put
  belief.update(obs, {});
  CHECK(belief.resets() == 1);
  const auto post = belief.posterior();
  CHECK(post[0] == doctest::Approx(0.5));
  for (std::size_t k = 0; k < 2; ++k) CHECK(belief.strategy_belief(k).filtered[3] == 1.0);

  obs.t = 2;
  obs.informant_region = std::vector<NodeId>{};
  CHECK_THROWS_AS(belief.update(obs, {}), InconsistentHistory);
}
