#include "pursuit/assignment.hpp"

#include <limits>

#include "pursuit/errors.hpp"

namespace pursuit {

std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols) {
  if (rows < 0 || cols < rows) throw InvalidParameter("assignment needs rows <= cols");
  if (cost.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw InvalidParameter("assignment cost matrix has the wrong size");
  if (rows == 0) return {};

  // Potentials-based Hungarian method, 1-indexed with a virtual column 0.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::size_t>(rows);
  const auto m = static_cast<std::size_t>(cols);
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
  auto a = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * m + (j - 1)]; };

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> out(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (match[j] != 0) out[match[j] - 1] = static_cast<int>(j - 1);
  return out;
}

}  // namespace pursuit
