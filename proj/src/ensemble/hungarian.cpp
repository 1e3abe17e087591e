#include "ensemble/hungarian.hpp"

#include <limits>

#include "common/error.hpp"

namespace fairgen {

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  require(cost.rows() == cost.cols(), ErrorCode::InvalidArgument, "assignment needs a square cost matrix");
  require(cost.allFinite(), ErrorCode::Numeric, "assignment cost matrix has non-finite entries");
  const auto n = static_cast<std::size_t>(cost.rows());
  Assignment out;
  if (n == 0) return out;

  // 1-based arrays; column 0 is the virtual start of each augmenting path.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.column_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.column_of_row[row_of_col[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i)
    out.cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.column_of_row[i]));
  return out;
}

}  // namespace fairgen
