#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pursuit {

using NodeId = int;

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Undirected unweighted graph embedded in a rectangular board.
///
/// Every node is its own neighbour. Node ids are dense, 0..node_count()-1,
/// assigned row-major over the walkable cells of the board. All-pairs hop
/// distances are precomputed at construction; unreachable pairs hold
/// `unreachable()` (== node_count()).
class Graph {
 public:
  /// Builds a graph from per-node cells; two nodes are adjacent when their
  /// cells are 4-neighbours. Cells must be distinct and listed row-major.
  Graph(int rows, int cols, std::vector<Cell> cells);

  int node_count() const { return static_cast<int>(cells_.size()); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool valid(NodeId n) const { return n >= 0 && n < node_count(); }

  /// Neighbours of `n` in ascending id order, including `n` itself.
  std::span<const NodeId> neighbors(NodeId n) const {
    return {adj_.data() + offsets_[n], adj_.data() + offsets_[n + 1]};
  }
  bool adjacent(NodeId a, NodeId b) const;

  int dist(NodeId a, NodeId b) const {
    return dist_[static_cast<std::size_t>(a) * cells_.size() + static_cast<std::size_t>(b)];
  }
  int unreachable() const { return node_count(); }
  int diameter() const;

  /// Nodes within hop distance `radius` of `n`, ascending.
  std::vector<NodeId> vision_set(NodeId n, int radius) const;

  Cell cell(NodeId n) const { return cells_[static_cast<std::size_t>(n)]; }
  std::optional<NodeId> node_at(int row, int col) const;

  /// Connected iff every pair has a finite distance.
  bool connected() const;

  /// Recomputes hop distances from `source` with a fresh BFS (no table use).
  std::vector<int> bfs_from(NodeId source) const;

 private:
  int rows_;
  int cols_;
  std::vector<Cell> cells_;
  std::vector<NodeId> board_;  // rows*cols, -1 for walls
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adj_;
  std::vector<int> dist_;
};

/// m x m grid, row-major ids; node i = (i / m, i % m).
Graph build_grid(int m);

/// Parses an ASCII board: '#' is a wall, any of ".oGP" is walkable.
/// Throws ParseError on ragged or empty input and InvalidLayout when the
/// walkable cells are not one connected component.
Graph build_maze(std::string_view layout);

std::vector<NodeId> vision_set(const Graph& g, NodeId n, int radius);

/// Per-node vision balls for a fixed radius, precomputed for hot loops.
class VisionIndex {
 public:
  VisionIndex(const Graph& g, int radius);
  int radius() const { return radius_; }
  std::span<const NodeId> ball(NodeId n) const {
    return {nodes_.data() + offsets_[n], nodes_.data() + offsets_[n + 1]};
  }

 private:
  int radius_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> nodes_;
};

}  // namespace pursuit
