#include "pursuit/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pursuit/errors.hpp"

namespace pursuit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool contains(std::span<const NodeId> set, NodeId n) { return std::find(set.begin(), set.end(), n) != set.end(); }

}  // namespace

std::vector<NodeId> effective_region(const Graph& g, const std::optional<std::vector<NodeId>>& informant,
                                     std::span<const NodeId> pursuers, int vision_radius,
                                     std::span<const NodeId> goal_set) {
  auto keep = [&](NodeId n) {
    for (NodeId w : pursuers)
      if (g.dist(w, n) <= vision_radius) return false;
    return !contains(goal_set, n);
  };
  std::vector<NodeId> out;
  if (informant) {
    for (NodeId n : *informant)
      if (keep(n)) out.push_back(n);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  } else {
    for (NodeId n = 0; n < g.node_count(); ++n)
      if (keep(n)) out.push_back(n);
  }
  return out;
}

std::vector<NodeId> observation_region(const Graph& g, const PursuerObservation& obs, int vision_radius,
                                       std::span<const NodeId> goal_set) {
  if (obs.evader_seen_at) {
    if (contains(goal_set, *obs.evader_seen_at)) return {};
    return {*obs.evader_seen_at};
  }
  return effective_region(g, obs.informant_region, obs.pursuers, vision_radius, goal_set);
}

std::vector<double> predict(const TransitionModel& model, std::span<const double> filtered) {
  std::vector<double> out(filtered.size());
  model.apply(filtered, out);
  return out;
}

Conditioned condition(std::span<const double> predicted, std::span<const NodeId> region) {
  Conditioned c;
  for (NodeId r : region) c.likelihood += predicted[static_cast<std::size_t>(r)];
  if (!(c.likelihood > 0.0)) {
    c.likelihood = 0.0;
    return c;
  }
  c.filtered.assign(predicted.size(), 0.0);
  for (NodeId r : region) c.filtered[static_cast<std::size_t>(r)] = predicted[static_cast<std::size_t>(r)] / c.likelihood;
  return c;
}

std::vector<double> strategy_posterior(std::span<const double> log_likelihoods, std::span<const double> prior) {
  if (log_likelihoods.size() != prior.size()) throw InvalidParameter("posterior: size mismatch");
  std::vector<double> logw(prior.size(), kNegInf);
  double top = kNegInf;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (prior[i] > 0.0 && log_likelihoods[i] > kNegInf) logw[i] = log_likelihoods[i] + std::log(prior[i]);
    top = std::max(top, logw[i]);
  }
  if (top == kNegInf) throw InconsistentHistory("every strategy has zero posterior weight");
  std::vector<double> w(prior.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = logw[i] == kNegInf ? 0.0 : std::exp(logw[i] - top);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<std::size_t> truncated_support(std::span<const double> posterior, double d, TruncationRule rule) {
  if (!(d > 0.0 && d <= 1.0)) throw InvalidParameter("truncation coefficient must lie in (0, 1]");
  std::vector<std::size_t> order(posterior.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return posterior[a] > posterior[b]; });
  // Strategies with equal weight are kept or dropped together, so the head
  // never depends on index order.
  constexpr double kSlack = 1e-12;
  double mass = 0.0;
  std::size_t keep = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t end = i + 1;
    double group = posterior[order[i]];
    while (end < order.size() && posterior[order[i]] - posterior[order[end]] <= kSlack) group += posterior[order[end++]];
    if (rule == TruncationRule::kHeadWithinMass) {
      if (i > 0 && mass + group > d + kSlack) break;
      mass += group;
      keep = end;
    } else {
      mass += group;
      keep = end;
      if (mass >= d - kSlack) break;
    }
    i = end;
  }
  order.resize(keep);
  while (order.size() > 1 && posterior[order.back()] <= 0.0) order.pop_back();
  return order;
}

std::size_t truncated_sample(std::span<const double> posterior, double d, Rng& rng, TruncationRule rule) {
  const auto head = truncated_support(posterior, d, rule);
  std::vector<double> w;
  w.reserve(head.size());
  for (std::size_t i : head) w.push_back(posterior[i]);
  return head[rng.categorical(w)];
}

std::vector<double> point_mass(int n, NodeId node) {
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  p[static_cast<std::size_t>(node)] = 1.0;
  return p;
}

std::vector<double> uniform_unseen(const Graph& g, std::span<const NodeId> pursuers, int vision_radius) {
  const auto region = effective_region(g, std::nullopt, pursuers, vision_radius, {});
  std::vector<double> p(static_cast<std::size_t>(g.node_count()), 0.0);
  for (NodeId n : region) p[static_cast<std::size_t>(n)] = 1.0 / static_cast<double>(region.size());
  return p;
}

BeliefState::BeliefState(std::shared_ptr<const Graph> graph, StrategyClass strategies, int vision_radius)
    : graph_(std::move(graph)), class_(std::move(strategies)), vision_radius_(vision_radius) {
  class_.validate(*graph_);
  if (vision_radius_ < 0) throw InvalidParameter("vision radius must be nonnegative");
  models_.reserve(class_.size());
  for (const auto& s : class_.strategies) models_.emplace_back(*graph_, s);
  beliefs_.resize(class_.size());
}

void BeliefState::initialize(std::span<const double> initial_prior, const PursuerObservation& obs) {
  if (initial_prior.size() != static_cast<std::size_t>(graph_->node_count()))
    throw InvalidParameter("initial location prior has the wrong size");
  t_ = obs.t;
  resets_ = 0;
  bool any_alive = false;
  for (std::size_t i = 0; i < beliefs_.size(); ++i) {
    auto& b = beliefs_[i];
    b.predicted.assign(initial_prior.begin(), initial_prior.end());
    const auto goals = class_.strategies[i].goal_set();
    const auto c = condition(b.predicted, observation_region(*graph_, obs, vision_radius_, goals));
    b.alive = c.likelihood > 0.0;
    b.log_likelihood = b.alive ? std::log(c.likelihood) : kNegInf;
    b.filtered = c.filtered;
    any_alive = any_alive || b.alive;
  }
  if (!any_alive) reset_from(obs);
}

void BeliefState::update(const PursuerObservation& obs, const EvaderContext& ctx) {
  t_ = obs.t;
  bool any_alive = false;
  for (std::size_t i = 0; i < beliefs_.size(); ++i) {
    auto& b = beliefs_[i];
    if (!b.alive) continue;
    models_[i].set_context(ctx);
    b.predicted = predict(models_[i], b.filtered);
    const auto goals = class_.strategies[i].goal_set();
    auto c = condition(b.predicted, observation_region(*graph_, obs, vision_radius_, goals));
    if (c.likelihood > 0.0) {
      b.log_likelihood += std::log(c.likelihood);
      b.filtered = std::move(c.filtered);
      any_alive = true;
    } else {
      b.alive = false;
      b.log_likelihood = kNegInf;
      b.filtered.clear();
    }
  }
  if (!any_alive) reset_from(obs);
}

void BeliefState::reset_from(const PursuerObservation& obs) {
  // No hypothesis explains the history: restart every strategy from the prior
  // weights and a uniform location belief over what the observation allows.
  ++resets_;
  bool any_alive = false;
  for (std::size_t i = 0; i < beliefs_.size(); ++i) {
    auto& b = beliefs_[i];
    const auto region = observation_region(*graph_, obs, vision_radius_, class_.strategies[i].goal_set());
    b.predicted.assign(static_cast<std::size_t>(graph_->node_count()), 0.0);
    for (NodeId r : region) b.predicted[static_cast<std::size_t>(r)] = 1.0 / static_cast<double>(region.size());
    b.alive = !region.empty();
    b.log_likelihood = b.alive ? 0.0 : kNegInf;
    b.filtered = b.alive ? b.predicted : std::vector<double>{};
    any_alive = any_alive || b.alive;
  }
  if (!any_alive)
    throw InconsistentHistory("observation at t=" + std::to_string(obs.t) +
                              " leaves no admissible evader location for any strategy");
}

std::vector<double> BeliefState::posterior() const {
  std::vector<double> logs;
  logs.reserve(beliefs_.size());
  for (const auto& b : beliefs_) logs.push_back(b.log_likelihood);
  return strategy_posterior(logs, class_.prior);
}

}  // namespace pursuit
