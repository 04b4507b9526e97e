#include "pursuit/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "pursuit/errors.hpp"

namespace pursuit {

Graph::Graph(int rows, int cols, std::vector<Cell> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows_ <= 0 || cols_ <= 0) throw InvalidParameter("graph board must be non-empty");
  if (cells_.empty()) throw InvalidParameter("graph needs at least one node");
  board_.assign(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), -1);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell c = cells_[i];
    if (c.row < 0 || c.row >= rows_ || c.col < 0 || c.col >= cols_)
      throw InvalidParameter("cell outside board");
    auto& slot = board_[static_cast<std::size_t>(c.row * cols_ + c.col)];
    if (slot != -1) throw InvalidParameter("duplicate cell");
    slot = static_cast<NodeId>(i);
  }

  const int n = node_count();
  offsets_.reserve(static_cast<std::size_t>(n) + 1);
  offsets_.push_back(0);
  for (NodeId v = 0; v < n; ++v) {
    const Cell c = cells_[static_cast<std::size_t>(v)];
    std::vector<NodeId> nb{v};
    constexpr int dr[] = {-1, 1, 0, 0};
    constexpr int dc[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      if (auto u = node_at(c.row + dr[k], c.col + dc[k])) nb.push_back(*u);
    }
    std::sort(nb.begin(), nb.end());
    adj_.insert(adj_.end(), nb.begin(), nb.end());
    offsets_.push_back(adj_.size());
  }

  dist_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (NodeId s = 0; s < n; ++s) {
    const auto row = bfs_from(s);
    std::copy(row.begin(), row.end(), dist_.begin() + static_cast<std::ptrdiff_t>(s) * n);
  }
}

std::vector<int> Graph::bfs_from(NodeId source) const {
  const int n = node_count();
  std::vector<int> d(static_cast<std::size_t>(n), n);
  std::deque<NodeId> queue{source};
  d[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId w : neighbors(u)) {
      if (d[static_cast<std::size_t>(w)] == n) {
        d[static_cast<std::size_t>(w)] = d[static_cast<std::size_t>(u)] + 1;
        queue.push_back(w);
      }
    }
  }
  return d;
}

bool Graph::adjacent(NodeId a, NodeId b) const {
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

int Graph::diameter() const {
  int best = 0;
  for (int d : dist_) best = std::max(best, d);
  return best;
}

std::optional<NodeId> Graph::node_at(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) return std::nullopt;
  const NodeId id = board_[static_cast<std::size_t>(row * cols_ + col)];
  if (id < 0) return std::nullopt;
  return id;
}

bool Graph::connected() const {
  return std::none_of(dist_.begin(), dist_.end(), [&](int d) { return d >= unreachable(); });
}

std::vector<NodeId> Graph::vision_set(NodeId n, int radius) const {
  if (!valid(n)) throw InvalidParameter("vision_set: invalid node " + std::to_string(n));
  if (radius < 0) throw InvalidParameter("vision_set: negative radius");
  std::vector<NodeId> out;
  for (NodeId u = 0; u < node_count(); ++u) {
    if (dist(n, u) <= radius) out.push_back(u);
  }
  return out;
}

std::vector<NodeId> vision_set(const Graph& g, NodeId n, int radius) { return g.vision_set(n, radius); }

Graph build_grid(int m) {
  if (m < 2) throw InvalidParameter("grid size must be at least 2, got " + std::to_string(m));
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(m * m));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) cells.push_back({r, c});
  return Graph(m, m, std::move(cells));
}

Graph build_maze(std::string_view layout) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(layout)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("maze layout is empty");
  const std::size_t width = lines.front().size();
  if (width == 0) throw ParseError("maze layout has an empty first row");

  std::vector<Cell> cells;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].size() != width)
      throw ParseError("maze row " + std::to_string(r) + " has width " +
                       std::to_string(lines[r].size()) + ", expected " + std::to_string(width));
    for (std::size_t c = 0; c < width; ++c) {
      switch (lines[r][c]) {
        case '#':
          break;
        case '.':
        case 'o':
        case 'G':
        case 'P':
          cells.push_back({static_cast<int>(r), static_cast<int>(c)});
          break;
        default:
          throw ParseError(std::string("unexpected maze character '") + lines[r][c] + "' at row " +
                           std::to_string(r));
      }
    }
  }
  if (cells.empty()) throw InvalidLayout("maze has no walkable cells");
  Graph g(static_cast<int>(lines.size()), static_cast<int>(width), std::move(cells));
  if (!g.connected()) throw InvalidLayout("maze walkable cells are not connected");
  return g;
}

VisionIndex::VisionIndex(const Graph& g, int radius) : radius_(radius) {
  if (radius < 0) throw InvalidParameter("vision radius must be nonnegative");
  offsets_.push_back(0);
  for (NodeId n = 0; n < g.node_count(); ++n) {
    for (NodeId u = 0; u < g.node_count(); ++u)
      if (g.dist(n, u) <= radius) nodes_.push_back(u);
    offsets_.push_back(nodes_.size());
  }
}

}  // namespace pursuit
