#include "pursuit/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pursuit/assignment.hpp"
#include "pursuit/errors.hpp"

namespace pursuit {

void PlannerConfig::validate() const {
  if (lookahead < 0) throw InvalidParameter("lookahead must be nonnegative");
  if (rollouts_per_path < 1) throw InvalidParameter("rollouts_per_path must be positive");
  if (rollout_horizon < 0) throw InvalidParameter("rollout_horizon must be nonnegative");
  if (!(discount > 0.0 && discount <= 1.0)) throw InvalidParameter("discount must lie in (0, 1]");
  if (!(truncation > 0.0 && truncation <= 1.0)) throw InvalidParameter("truncation must lie in (0, 1]");
  if (max_paths < 1) throw InvalidParameter("max_paths must be positive");
}

int PlannerConfig::horizon_for(const Graph& g) const {
  if (rollout_horizon > 0) return rollout_horizon;
  return 4 * std::max(g.rows(), g.cols());
}

double proximity(int distance) { return distance == 0 ? 2.0 : 1.0 / static_cast<double>(distance); }

std::vector<NodeId> heuristic_targets(std::span<const double> mass, std::span<const NodeId> pursuers,
                                      const Graph& g) {
  const std::size_t k = pursuers.size();
  const std::size_t n = mass.size();
  if (k == 0) return {};
  if (k > n) throw InvalidParameter("more pursuers than nodes");

  // k-th largest mass value.
  std::vector<double> top(k, -std::numeric_limits<double>::infinity());
  for (double x : mass) {
    if (x <= top[k - 1]) continue;
    std::size_t j = k - 1;
    while (j > 0 && top[j - 1] < x) {
      top[j] = top[j - 1];
      --j;
    }
    top[j] = x;
  }
  const double kth = top[k - 1];
  constexpr double kTie = 1e-12;

  std::vector<NodeId> columns;
  std::vector<char> forced;
  for (std::size_t i = 0; i < n; ++i) {
    if (mass[i] > kth + kTie) {
      columns.push_back(static_cast<NodeId>(i));
      forced.push_back(1);
    } else if (mass[i] >= kth - kTie) {
      columns.push_back(static_cast<NodeId>(i));
      forced.push_back(0);
    }
  }

  // Maximise proximity subject to covering every strictly-larger node; the
  // bonus outweighs any achievable proximity total.
  const double bonus = 2.0 * static_cast<double>(k) + 1.0;
  const int cols = static_cast<int>(columns.size());
  std::vector<double> cost(k * columns.size());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < columns.size(); ++j)
      cost[i * columns.size() + j] =
          -(proximity(g.dist(pursuers[i], columns[j])) + (forced[j] ? bonus : 0.0));
  const auto assign = solve_assignment(cost, static_cast<int>(k), cols);
  std::vector<NodeId> targets(k);
  for (std::size_t i = 0; i < k; ++i) targets[i] = columns[static_cast<std::size_t>(assign[i])];
  return targets;
}

std::vector<JointAction> joint_actions(const Graph& g, std::span<const NodeId> pursuers) {
  std::vector<JointAction> out{{}};
  for (NodeId w : pursuers) {
    std::vector<JointAction> next;
    for (const auto& prefix : out)
      for (NodeId y : g.neighbors(w)) {
        auto a = prefix;
        a.push_back(y);
        next.push_back(std::move(a));
      }
    out = std::move(next);
  }
  return out;
}

std::size_t count_paths(const Graph& g, std::span<const NodeId> pursuers, int lookahead) {
  if (lookahead <= 0) return 1;
  std::size_t total = 0;
  for (const auto& a : joint_actions(g, pursuers)) {
    total += count_paths(g, a, lookahead - 1);
    if (total > (std::size_t{1} << 40)) break;
  }
  return total;
}

namespace {

struct SimState {
  NodeId evader = 0;
  std::vector<NodeId> pursuers;
  std::vector<double> belief;
  std::vector<NodeId> dots;
  double ret = 0.0;
  double disc = 1.0;
  double informant_sum = 0.0;
  int t = 0;
  int steps = 0;
  bool done = false;
  StreamRng evader_rng;
  StreamRng pursuer_rng;
};

/// Simulates the game rules for rollouts under the sampled strategy.
class Simulator {
 public:
  Simulator(const RolloutModel& model, const PlannerConfig& config)
      : model_(model),
        g_(*model.graph),
        transitions_(g_, model.strategy),
        vision_(g_, model.vision_radius),
        config_(config),
        horizon_(config.horizon_for(g_)),
        goals_(model.strategy.goal_set()),
        scratch_(static_cast<std::size_t>(g_.node_count())),
        mask_(static_cast<std::size_t>(g_.node_count()), 0) {}

  int horizon() const { return horizon_; }

  /// One tick with the given joint action; `prediction` may hold T * belief
  /// under the pre-move context (reused when the strategy ignores context).
  void advance(SimState& s, std::span<const NodeId> action, const std::vector<double>* prediction) {
    s.pursuers.assign(action.begin(), action.end());
    s.t += 1;
    s.steps += 1;
    double reward = model_.reward.step_reward;
    if (within_capture(g_, s.pursuers, s.evader)) {
      s.done = true;
      reward = model_.reward.capture_reward;
    } else {
      const EvaderContext ctx{s.pursuers, s.dots};
      s.evader = sample_evader(s, ctx);
      if (model_.pacman) {
        const auto it = std::lower_bound(s.dots.begin(), s.dots.end(), s.evader);
        if (it != s.dots.end() && *it == s.evader) s.dots.erase(it);
      }
      if (within_capture(g_, s.pursuers, s.evader)) {
        s.done = true;
        reward = model_.reward.capture_reward;
      } else if (model_.strategy.is_goal(s.evader) || (model_.pacman && s.dots.empty())) {
        s.done = true;
        reward = model_.reward.goal_penalty;
      }
    }
    s.ret += s.disc * reward;
    s.disc *= config_.discount;
    if (s.steps >= horizon_) s.done = true;
    if (s.done) return;

    if (prediction && !model_.strategy.context_dependent()) {
      scratch_ = *prediction;
    } else {
      predict_into(s, s.belief, scratch_);
    }
    observe(s);
  }

  /// Heuristic continuation until the rollout ends.
  void finish(SimState& s) {
    std::vector<double> prediction(s.belief.size());
    while (!s.done) {
      predict_into(s, s.belief, prediction);
      const auto targets = heuristic_targets(prediction, s.pursuers, g_);
      const auto action = step_toward(g_, s.pursuers, targets, s.pursuer_rng);
      advance(s, action, &prediction);
    }
  }

 private:
  NodeId sample_evader(SimState& s, const EvaderContext& ctx) {
    if (!model_.strategy.context_dependent()) return transitions_.sample(s.evader, s.evader_rng);
    const auto col = transition_column(g_, model_.strategy, s.evader, ctx);
    double u = s.evader_rng.uniform();
    for (const auto& e : col) {
      if (u < e.prob) return e.to;
      u -= e.prob;
    }
    return col.back().to;
  }

  void predict_into(const SimState& s, std::span<const double> in, std::vector<double>& out) {
    if (!model_.strategy.context_dependent()) {
      transitions_.apply(in, out);
      return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    const EvaderContext ctx{s.pursuers, s.dots};
    for (std::size_t from = 0; from < in.size(); ++from) {
      if (in[from] == 0.0) continue;
      for (const auto& e : transition_column(g_, model_.strategy, static_cast<NodeId>(from), ctx))
        out[static_cast<std::size_t>(e.to)] += e.prob * in[from];
    }
  }

  /// Conditions scratch_ (the prediction) on the simulated observation and
  /// stores the result as the rollout belief.
  void observe(SimState& s) {
    bool seen = false;
    for (NodeId w : s.pursuers)
      if (g_.dist(w, s.evader) <= model_.vision_radius) seen = true;
    auto& b = s.belief;
    if (seen) {
      std::fill(b.begin(), b.end(), 0.0);
      b[static_cast<std::size_t>(s.evader)] = 1.0;
      return;
    }
    std::fill(mask_.begin(), mask_.end(), 1);
    for (NodeId w : s.pursuers)
      for (NodeId u : vision_.ball(w)) mask_[static_cast<std::size_t>(u)] = 0;
    for (NodeId goal : goals_) mask_[static_cast<std::size_t>(goal)] = 0;
    if (config_.rollout_informant && model_.informant.scheme == InformantScheme::kQuadrant) {
      s.informant_sum += s.evader_rng.exponential_mean(model_.informant.mean());
      if (s.informant_sum > static_cast<double>(s.t)) {
        const auto quad = quadrant_of(g_, s.evader);
        std::vector<char> in_quad(mask_.size(), 0);
        for (NodeId u : quad) in_quad[static_cast<std::size_t>(u)] = 1;
        for (std::size_t i = 0; i < mask_.size(); ++i) mask_[i] = mask_[i] && in_quad[i];
      }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = mask_[i] ? scratch_[i] : 0.0;
      total += b[i];
    }
    if (total > 0.0) {
      for (double& x : b) x /= total;
    } else {
      // Numerically lost the simulated evader; fall back to what was seen.
      std::fill(b.begin(), b.end(), 0.0);
      b[static_cast<std::size_t>(s.evader)] = 1.0;
    }
  }

  const RolloutModel& model_;
  const Graph& g_;
  TransitionModel transitions_;
  VisionIndex vision_;
  const PlannerConfig& config_;
  int horizon_;
  std::vector<NodeId> goals_;
  std::vector<double> scratch_;
  std::vector<char> mask_;
};

struct PathNode {
  JointAction action;
  int parent = -1;
  int depth = 0;
  std::vector<int> children;
};

/// Tree of joint pursuer paths; depth-1 nodes are the first actions.
std::vector<PathNode> build_tree(const Graph& g, std::span<const NodeId> pursuers, int lookahead,
                                 const std::optional<JointAction>& only_first, std::size_t max_paths) {
  std::size_t leaves = 0;
  if (only_first) {
    leaves = count_paths(g, *only_first, lookahead - 1);
  } else {
    leaves = count_paths(g, pursuers, lookahead);
  }
  if (leaves > max_paths)
    throw BudgetExceeded("lookahead " + std::to_string(lookahead) + " needs " + std::to_string(leaves) +
                         " joint paths (budget " + std::to_string(max_paths) + "); lower the lookahead");

  std::vector<PathNode> tree(1);
  tree[0].action.assign(pursuers.begin(), pursuers.end());
  std::vector<int> frontier{0};
  for (int depth = 1; depth <= lookahead; ++depth) {
    std::vector<int> next;
    for (int parent : frontier) {
      std::vector<JointAction> moves;
      if (depth == 1 && only_first) {
        moves.push_back(*only_first);
      } else {
        moves = joint_actions(g, tree[static_cast<std::size_t>(parent)].action);
      }
      for (auto& a : moves) {
        PathNode node;
        node.action = std::move(a);
        node.parent = parent;
        node.depth = depth;
        tree.push_back(std::move(node));
        const int id = static_cast<int>(tree.size()) - 1;
        tree[static_cast<std::size_t>(parent)].children.push_back(id);
        next.push_back(id);
      }
    }
    frontier = std::move(next);
  }
  return tree;
}

SimState root_state(const RolloutRoot& root, const PlannerConfig& config, std::uint64_t seed, int rollout) {
  SimState s;
  s.pursuers = root.pursuers;
  s.belief = root.belief;
  s.dots = root.remaining_dots;
  s.t = root.t;
  s.evader_rng = StreamRng(derive_seed(seed, static_cast<std::uint64_t>(rollout), 0));
  s.pursuer_rng = StreamRng(derive_seed(seed, static_cast<std::uint64_t>(rollout), 1));
  s.evader = root.evader;
  if (config.start == RolloutStart::kSampledNode) {
    StreamRng pick(derive_seed(seed, static_cast<std::uint64_t>(rollout), 2));
    double u = pick.uniform();
    for (std::size_t i = 0; i < root.belief.size(); ++i) {
      if (root.belief[i] <= 0.0) continue;
      s.evader = static_cast<NodeId>(i);
      if (u < root.belief[i]) break;
      u -= root.belief[i];
    }
  }
  return s;
}

/// Runs every rollout through the tree; returns the mean return per leaf,
/// indexed by tree node id (non-leaves unused).
std::vector<double> evaluate_tree(Simulator& sim, const std::vector<PathNode>& tree, const RolloutRoot& root,
                                  const PlannerConfig& config, std::uint64_t seed) {
  std::vector<double> leaf_sum(tree.size(), 0.0);
  std::vector<double> terminal_sum(tree.size(), 0.0);

  // Depth-first walk reusing one state per depth.
  std::vector<SimState> stack(static_cast<std::size_t>(config.lookahead) + 1);
  auto visit = [&](auto&& self, int node_id) -> void {
    const auto& node = tree[static_cast<std::size_t>(node_id)];
    for (int child_id : node.children) {
      const auto& child = tree[static_cast<std::size_t>(child_id)];
      auto& st = stack[static_cast<std::size_t>(child.depth)];
      st = stack[static_cast<std::size_t>(node.depth)];
      sim.advance(st, child.action, nullptr);
      if (st.done) {
        terminal_sum[static_cast<std::size_t>(child_id)] += st.ret;
      } else if (child.children.empty()) {
        sim.finish(st);
        leaf_sum[static_cast<std::size_t>(child_id)] += st.ret;
      } else {
        self(self, child_id);
      }
    }
  };

  for (int i = 0; i < config.rollouts_per_path; ++i) {
    stack[0] = root_state(root, config, seed, i);
    visit(visit, 0);
  }

  std::vector<double> total(tree.size(), 0.0);
  for (std::size_t id = 1; id < tree.size(); ++id) {
    const auto& node = tree[id];
    total[id] = terminal_sum[id] + total[static_cast<std::size_t>(node.parent)];
  }
  const double s = static_cast<double>(config.rollouts_per_path);
  for (std::size_t id = 1; id < tree.size(); ++id)
    if (tree[id].children.empty()) total[id] = (total[id] + leaf_sum[id]) / s;
  return total;
}

double best_leaf_under(const std::vector<PathNode>& tree, const std::vector<double>& value, int node_id) {
  const auto& node = tree[static_cast<std::size_t>(node_id)];
  if (node.children.empty()) return value[static_cast<std::size_t>(node_id)];
  double best = -std::numeric_limits<double>::infinity();
  for (int c : node.children) best = std::max(best, best_leaf_under(tree, value, c));
  return best;
}

void check_root(const RolloutModel& model, const RolloutRoot& root) {
  if (!model.graph) throw InvalidParameter("rollout model has no graph");
  if (root.belief.size() != static_cast<std::size_t>(model.graph->node_count()))
    throw InvalidParameter("rollout belief has the wrong size");
  if (!model.graph->valid(root.evader)) throw InvalidParameter("rollout evader node is invalid");
}

double heuristic_value(Simulator& sim, const RolloutRoot& root, const PlannerConfig& config, std::uint64_t seed) {
  double sum = 0.0;
  for (int i = 0; i < config.rollouts_per_path; ++i) {
    auto st = root_state(root, config, seed, i);
    sim.finish(st);
    sum += st.ret;
  }
  return sum / static_cast<double>(config.rollouts_per_path);
}

}  // namespace

std::vector<ActionValue> evaluate_actions(const RolloutModel& model, const RolloutRoot& root,
                                          const PlannerConfig& config, std::uint64_t seed) {
  config.validate();
  check_root(model, root);
  Simulator sim(model, config);
  if (config.lookahead == 0) return {ActionValue{{}, heuristic_value(sim, root, config, seed)}};

  const auto tree = build_tree(*model.graph, root.pursuers, config.lookahead, std::nullopt, config.max_paths);
  const auto value = evaluate_tree(sim, tree, root, config, seed);
  std::vector<ActionValue> out;
  for (int c : tree[0].children)
    out.push_back({tree[static_cast<std::size_t>(c)].action, best_leaf_under(tree, value, c)});
  return out;
}

double estimate_q(const RolloutModel& model, const RolloutRoot& root, const JointAction& first_action,
                  const PlannerConfig& config, std::uint64_t seed) {
  config.validate();
  check_root(model, root);
  Simulator sim(model, config);
  if (config.lookahead == 0) return heuristic_value(sim, root, config, seed);
  if (first_action.size() != root.pursuers.size())
    throw IllegalAction("first action has the wrong number of pursuers");
  for (std::size_t k = 0; k < first_action.size(); ++k)
    if (!model.graph->adjacent(root.pursuers[k], first_action[k]))
      throw IllegalAction("first action moves pursuer " + std::to_string(k) + " to a non-neighbour");
  const auto tree = build_tree(*model.graph, root.pursuers, config.lookahead, first_action, config.max_paths);
  const auto value = evaluate_tree(sim, tree, root, config, seed);
  return best_leaf_under(tree, value, tree[0].children.front());
}

ThompsonAgent::ThompsonAgent(StrategyClass strategies, PlannerConfig config)
    : strategies_(std::move(strategies)), config_(config) {
  config_.validate();
}

void ThompsonAgent::begin_episode(const GameConfig& config, const PursuerObservation& initial,
                                  std::uint64_t seed) {
  game_ = config;
  graph_ = config.graph;
  rng_ = Rng(seed);
  seed_ = seed;
  sampled_.reset();
  values_.clear();
  belief_.emplace(graph_, strategies_, config.vision_radius);
  std::vector<double> p0;
  if (initial.informant_region) {
    p0.assign(static_cast<std::size_t>(graph_->node_count()), 0.0);
    for (NodeId n : *initial.informant_region)
      p0[static_cast<std::size_t>(n)] = 1.0 / static_cast<double>(initial.informant_region->size());
  } else {
    p0 = uniform_unseen(*graph_, initial.pursuers, config.vision_radius);
  }
  belief_->initialize(p0, initial);
  prev_dots_ = initial.remaining_dots;
}

JointAction ThompsonAgent::act(const PursuerObservation& obs, const GameState*) {
  if (!belief_) throw InvalidState("ThompsonAgent::act before begin_episode");
  if (obs.t > belief_->t()) {
    belief_->update(obs, EvaderContext{obs.pursuers, prev_dots_});
    prev_dots_ = obs.remaining_dots;
  }
  posterior_ = belief_->posterior();
  const auto k = truncated_sample(posterior_, config_.truncation, rng_, config_.truncation_rule);
  sampled_ = static_cast<int>(k);
  const auto& filtered = belief_->strategy_belief(k).filtered;
  const Graph& g = *graph_;

  if (config_.lookahead == 0) {
    values_.clear();
    TransitionModel model = belief_->model(k);
    model.set_context(EvaderContext{obs.pursuers, obs.remaining_dots});
    const auto next = predict(model, filtered);
    return heuristic_action(next, obs.pursuers, g, rng_);
  }

  RolloutRoot root;
  root.pursuers = obs.pursuers;
  root.belief = filtered;
  root.evader = static_cast<NodeId>(std::max_element(filtered.begin(), filtered.end()) - filtered.begin());
  root.remaining_dots = obs.remaining_dots;
  root.t = obs.t;

  RolloutModel model;
  model.graph = graph_;
  model.strategy = strategies_.strategies[k];
  model.vision_radius = game_.vision_radius;
  model.reward = game_.reward;
  model.informant = game_.informant;
  model.pacman = game_.pacman();

  values_ = evaluate_actions(model, root, config_, derive_seed(seed_, static_cast<std::uint64_t>(obs.t), 7));
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : values_) best = std::max(best, v.value);
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i].value >= best - tol) ties.push_back(i);
  return values_[ties[ties.size() == 1 ? 0 : rng_.index(ties.size())]].action;
}

void BenchmarkAgent::begin_episode(const GameConfig& config, const PursuerObservation&, std::uint64_t seed) {
  graph_ = config.graph;
  rng_ = Rng(seed);
}

JointAction BenchmarkAgent::act(const PursuerObservation& obs, const GameState* oracle) {
  if (!oracle) throw InvalidState("benchmark agent needs the evader's true location");
  return benchmark_action(oracle->evader, obs.pursuers, *graph_, rng_);
}

}  // namespace pursuit
