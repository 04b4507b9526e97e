#pragma once

#include <deque>
#include <set>
#include <string>
#include <vector>

#include "pursuit/graph.hpp"
#include "pursuit/rng.hpp"

namespace testing_support {

using pursuit::Graph;
using pursuit::NodeId;

/// Plain BFS over the neighbour lists, independent of the distance table.
inline std::vector<int> bfs(const Graph& g, NodeId src) {
  std::vector<int> d(static_cast<std::size_t>(g.node_count()), -1);
  std::deque<NodeId> q{src};
  d[static_cast<std::size_t>(src)] = 0;
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop_front();
    for (NodeId v : g.neighbors(u)) {
      if (d[static_cast<std::size_t>(v)] >= 0) continue;
      d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
      q.push_back(v);
    }
  }
  return d;
}

/// Random rows x cols layout with roughly `wall_share` walls; retried until
/// the walkable cells are connected.
inline std::string random_layout(pursuit::Rng& rng, int rows, int cols, double wall_share) {
  for (;;) {
    std::string text;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) text += rng.uniform() < wall_share ? '#' : '.';
      text += '\n';
    }
    try {
      pursuit::build_maze(text);
      return text;
    } catch (const std::exception&) {
    }
  }
}

/// Earliest tick at which some joint pursuer walk from `starts` captures an
/// evader that follows `trajectory`, found by expanding every reachable joint
/// position. -1 when no tick within the trajectory works.
inline int brute_force_capture_time(const Graph& g, const std::vector<NodeId>& starts,
                                    const std::vector<NodeId>& trajectory) {
  auto captures = [&](const std::vector<NodeId>& w, NodeId e) {
    for (NodeId x : w)
      if (g.dist(x, e) <= 1) return true;
    return false;
  };
  if (captures(starts, trajectory[0])) return 0;
  std::set<std::vector<NodeId>> reach{starts};
  for (std::size_t t = 1; t < trajectory.size(); ++t) {
    std::set<std::vector<NodeId>> next;
    for (const auto& w : reach) {
      std::vector<NodeId> move(w.size());
      auto expand = [&](auto&& self, std::size_t k) -> void {
        if (k == w.size()) {
          next.insert(move);
          return;
        }
        for (NodeId y : g.neighbors(w[k])) {
          move[k] = y;
          self(self, k + 1);
        }
      };
      expand(expand, 0);
    }
    reach = std::move(next);
    for (const auto& w : reach)
      if (captures(w, trajectory[t - 1]) || captures(w, trajectory[t])) return static_cast<int>(t);
  }
  return -1;
}

}  // namespace testing_support
