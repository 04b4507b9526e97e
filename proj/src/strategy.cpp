#include "pursuit/strategy.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>

#include "pursuit/errors.hpp"

namespace pursuit {

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kDriftWalk:
      return "drift-walk";
    case StrategyKind::kPacmanRandom:
      return "pacman-random";
    case StrategyKind::kPacmanFlee:
      return "pacman-flee";
    case StrategyKind::kPacmanDotSeek:
      return "pacman-dot-seek";
  }
  return "unknown";
}

StrategyKind strategy_kind_from_string(const std::string& name) {
  if (name == "drift-walk") return StrategyKind::kDriftWalk;
  if (name == "pacman-random") return StrategyKind::kPacmanRandom;
  if (name == "pacman-flee") return StrategyKind::kPacmanFlee;
  if (name == "pacman-dot-seek") return StrategyKind::kPacmanDotSeek;
  throw InvalidParameter("unknown strategy kind '" + name + "'");
}

EvaderStrategy EvaderStrategy::drift_walk(NodeId goal, double drift) {
  EvaderStrategy s;
  s.kind = StrategyKind::kDriftWalk;
  s.goal = goal;
  s.drift = drift;
  return s;
}

EvaderStrategy EvaderStrategy::random_walk() {
  EvaderStrategy s;
  s.kind = StrategyKind::kPacmanRandom;
  return s;
}

EvaderStrategy EvaderStrategy::flee(int radius) {
  EvaderStrategy s;
  s.kind = StrategyKind::kPacmanFlee;
  s.flee_radius = radius;
  return s;
}

EvaderStrategy EvaderStrategy::dot_seek(double drift, int radius) {
  EvaderStrategy s;
  s.kind = StrategyKind::kPacmanDotSeek;
  s.drift = drift;
  s.flee_radius = radius;
  return s;
}

std::vector<NodeId> EvaderStrategy::goal_set() const {
  if (goal) return {*goal};
  return {};
}

std::string EvaderStrategy::label() const {
  std::ostringstream os;
  switch (kind) {
    case StrategyKind::kDriftWalk:
      os << "drift(goal=" << (goal ? *goal : -1) << ",xi=" << drift << ")";
      break;
    case StrategyKind::kPacmanRandom:
      os << "random";
      break;
    case StrategyKind::kPacmanFlee:
      os << "flee(delta=" << flee_radius << ")";
      break;
    case StrategyKind::kPacmanDotSeek:
      os << "dot-seek(xi=" << drift << ",delta=" << flee_radius << ")";
      break;
  }
  return os.str();
}

void EvaderStrategy::validate(const Graph& g) const {
  if (!(drift >= 0.0 && drift <= 1.0)) throw InvalidParameter("strategy drift must lie in [0, 1]");
  if (flee_radius < 0) throw InvalidParameter("strategy flee radius must be nonnegative");
  if (kind == StrategyKind::kDriftWalk) {
    if (!goal) throw InvalidParameter("drift-walk strategy needs a goal node");
    if (!g.valid(*goal)) throw InvalidParameter("drift-walk goal is not a graph node");
  } else if (goal) {
    throw InvalidParameter(to_string(kind) + " strategy takes no goal");
  }
}

namespace {

int nearest_pursuer_distance(const Graph& g, NodeId n, std::span<const NodeId> pursuers) {
  int best = INT_MAX;
  for (NodeId w : pursuers) best = std::min(best, g.dist(n, w));
  return best;
}

bool fleeing(const Graph& g, const EvaderStrategy& s, NodeId from, const EvaderContext& ctx) {
  if (s.kind != StrategyKind::kPacmanFlee && s.kind != StrategyKind::kPacmanDotSeek) return false;
  return nearest_pursuer_distance(g, from, ctx.pursuers) < s.flee_radius;
}

/// Neighbours of `from` maximising the distance to the nearest pursuer.
std::vector<NodeId> flee_moves(const Graph& g, NodeId from, std::span<const NodeId> pursuers) {
  std::vector<NodeId> best;
  int best_d = -1;
  for (NodeId y : g.neighbors(from)) {
    const int d = nearest_pursuer_distance(g, y, pursuers);
    if (d > best_d) {
      best_d = d;
      best.clear();
    }
    if (d == best_d) best.push_back(y);
  }
  return best;
}

/// Neighbours of `from` minimising the distance to `target`.
std::vector<NodeId> approach_moves(const Graph& g, NodeId from, NodeId target) {
  std::vector<NodeId> best;
  int best_d = INT_MAX;
  for (NodeId y : g.neighbors(from)) {
    const int d = g.dist(y, target);
    if (d < best_d) {
      best_d = d;
      best.clear();
    }
    if (d == best_d) best.push_back(y);
  }
  return best;
}

std::vector<NodeId> closest_dots(const Graph& g, NodeId from, std::span<const NodeId> dots) {
  std::vector<NodeId> best;
  int best_d = INT_MAX;
  for (NodeId c : dots) {
    const int d = g.dist(from, c);
    if (d < best_d) {
      best_d = d;
      best.clear();
    }
    if (d == best_d) best.push_back(c);
  }
  return best;
}

void add_uniform(std::vector<double>& mass, std::span<const NodeId> nb, std::span<const NodeId> targets,
                 double weight) {
  const double each = weight / static_cast<double>(targets.size());
  for (NodeId y : targets) {
    const auto pos = std::lower_bound(nb.begin(), nb.end(), y) - nb.begin();
    mass[static_cast<std::size_t>(pos)] += each;
  }
}

}  // namespace

std::vector<TransitionEntry> transition_column(const Graph& g, const EvaderStrategy& s, NodeId from,
                                               const EvaderContext& ctx) {
  if (s.is_goal(from)) return {{from, 1.0}};
  const auto nb = g.neighbors(from);
  std::vector<double> mass(nb.size(), 0.0);

  if (fleeing(g, s, from, ctx)) {
    add_uniform(mass, nb, flee_moves(g, from, ctx.pursuers), 1.0);
  } else {
    switch (s.kind) {
      case StrategyKind::kDriftWalk: {
        add_uniform(mass, nb, approach_moves(g, from, *s.goal), s.drift);
        add_uniform(mass, nb, nb, 1.0 - s.drift);
        break;
      }
      case StrategyKind::kPacmanRandom:
      case StrategyKind::kPacmanFlee:
        add_uniform(mass, nb, nb, 1.0);
        break;
      case StrategyKind::kPacmanDotSeek: {
        const auto dots = closest_dots(g, from, ctx.remaining_dots);
        if (dots.empty()) {
          add_uniform(mass, nb, nb, 1.0);
          break;
        }
        const double per_dot = s.drift / static_cast<double>(dots.size());
        for (NodeId c : dots) add_uniform(mass, nb, approach_moves(g, from, c), per_dot);
        add_uniform(mass, nb, nb, 1.0 - s.drift);
        break;
      }
    }
  }

  std::vector<TransitionEntry> out;
  out.reserve(nb.size());
  for (std::size_t i = 0; i < nb.size(); ++i)
    if (mass[i] > 0.0) out.push_back({nb[i], mass[i]});
  return out;
}

TransitionMatrix transition_matrix(const Graph& g, const EvaderStrategy& strategy,
                                   const EvaderContext& ctx) {
  TransitionMatrix m(g.node_count());
  for (NodeId from = 0; from < g.node_count(); ++from)
    for (const auto& e : transition_column(g, strategy, from, ctx)) m.at(e.to, from) = e.prob;
  return m;
}

NodeId act(const Graph& g, const EvaderStrategy& s, NodeId from, const EvaderContext& ctx, Rng& rng) {
  if (s.is_goal(from)) return from;
  const auto nb = g.neighbors(from);
  auto pick = [&](const std::vector<NodeId>& v) { return v[rng.index(v.size())]; };
  auto uniform_move = [&] { return nb[rng.index(nb.size())]; };

  if (fleeing(g, s, from, ctx)) return pick(flee_moves(g, from, ctx.pursuers));
  switch (s.kind) {
    case StrategyKind::kDriftWalk:
      if (rng.uniform() < s.drift) return pick(approach_moves(g, from, *s.goal));
      return uniform_move();
    case StrategyKind::kPacmanRandom:
    case StrategyKind::kPacmanFlee:
      return uniform_move();
    case StrategyKind::kPacmanDotSeek: {
      const auto dots = closest_dots(g, from, ctx.remaining_dots);
      if (!dots.empty() && rng.uniform() < s.drift) return pick(approach_moves(g, from, pick(dots)));
      return uniform_move();
    }
  }
  return from;
}

TransitionModel::TransitionModel(const Graph& g, EvaderStrategy strategy)
    : graph_(&g), strategy_(std::move(strategy)) {
  strategy_.validate(g);
  rebuild({});
}

void TransitionModel::set_context(const EvaderContext& ctx) {
  if (strategy_.context_dependent()) rebuild(ctx);
}

void TransitionModel::rebuild(const EvaderContext& ctx) {
  offsets_.clear();
  entries_.clear();
  offsets_.push_back(0);
  for (NodeId from = 0; from < graph_->node_count(); ++from) {
    const auto col = transition_column(*graph_, strategy_, from, ctx);
    entries_.insert(entries_.end(), col.begin(), col.end());
    offsets_.push_back(entries_.size());
  }
}

void TransitionModel::apply(std::span<const double> in, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t from = 0; from < in.size(); ++from) {
    const double p = in[from];
    if (p == 0.0) continue;
    for (const auto& e : column(static_cast<NodeId>(from))) out[static_cast<std::size_t>(e.to)] += e.prob * p;
  }
}

StrategyClass StrategyClass::drift_grid(std::span<const NodeId> goals, std::span<const double> drifts) {
  std::vector<EvaderStrategy> out;
  for (NodeId goal : goals)
    for (double xi : drifts) out.push_back(EvaderStrategy::drift_walk(goal, xi));
  return uniform(std::move(out));
}

StrategyClass StrategyClass::uniform(std::vector<EvaderStrategy> strategies) {
  StrategyClass c;
  c.prior.assign(strategies.size(), strategies.empty() ? 0.0 : 1.0 / static_cast<double>(strategies.size()));
  c.strategies = std::move(strategies);
  return c;
}

std::optional<std::size_t> StrategyClass::find(const EvaderStrategy& s) const {
  for (std::size_t i = 0; i < strategies.size(); ++i)
    if (strategies[i] == s) return i;
  return std::nullopt;
}

void StrategyClass::validate(const Graph& g) const {
  if (strategies.empty()) throw InvalidParameter("strategy class is empty");
  if (prior.size() != strategies.size()) throw InvalidParameter("prior size does not match strategy class");
  double total = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0)) throw InvalidParameter("prior weights must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidParameter("prior weights must sum to 1");
  for (const auto& s : strategies) s.validate(g);
}

}  // namespace pursuit
