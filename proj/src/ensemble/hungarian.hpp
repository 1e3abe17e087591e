#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fairgen {

struct Assignment {
  std::vector<std::size_t> column_of_row;  // row i is assigned column column_of_row[i]
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// row/column potentials, O(n^3)).
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace fairgen
