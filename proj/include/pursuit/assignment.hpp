#pragma once

#include <vector>

namespace pursuit {

/// Minimum-cost assignment of every row to a distinct column of a
/// rows x cols cost matrix (rows <= cols), row-major. Returns the column
/// chosen for each row. O(rows^2 * cols) shortest augmenting paths.
std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols);

}  // namespace pursuit
