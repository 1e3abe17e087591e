#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coverage/coverage.hpp"
#include "ensemble/ensemble.hpp"

namespace fairgen::bo {

struct BoConfig {
  std::size_t n_targets = 3;
  std::size_t iterations = 50;     // EI acquisition rounds
  std::size_t random_walks = 10;   // extra uniform-random evaluations at the end
  std::size_t init_batches = 10;   // LHS evaluations at the start
  std::size_t candidates = 1000;   // random EI candidates per round
  double psi = 0.1;                // uncertainty penalty
  std::uint64_t seed = 0;

  void validate() const;
};

/// n_p target points in standardized property space.
using TargetBatch = std::vector<Point2>;

TargetBatch unflatten(const Eigen::VectorXd& x);
Eigen::VectorXd flatten(std::span<const Point2> batch);
Eigen::MatrixXd batch_matrix(std::span<const Point2> batch);

struct ObjectiveValue {
  double f = 0.0;
  double coverage = 0.0;     // S_C(D u D^P)
  double uncertainty = 0.0;  // S_U(D^P)
};

/// f = S_C(points u batch) - psi * S_U(batch).
ObjectiveValue objective(std::span<const Point2> points, std::span<const Point2> batch,
                         const ensemble::Ensemble& ens, const ensemble::Correspondence& corr,
                         const CoverageConfig& cov, double psi);

/// The coverage box shrunk by rho on each side.
Box search_bounds(const CoverageConfig& cov);

struct Evaluation {
  std::size_t index = 0;
  std::string phase;  // init | ei | random
  Eigen::VectorXd x;
  ObjectiveValue value;
};

struct BoResult {
  Eigen::VectorXd best_x;
  ObjectiveValue best;
  std::vector<Evaluation> trace;
};

/// Generic batch maximizer over the box [lo, hi]: LHS initial design, EI
/// rounds (random-candidate search refined by coordinate descent), then
/// uniform random evaluations. Returns the best evaluation seen.
BoResult maximize(const std::function<ObjectiveValue(const Eigen::VectorXd&)>& fn, const Eigen::VectorXd& lo,
                  const Eigen::VectorXd& hi, const BoConfig& config);

/// Optimizes the target batch jointly in 2 * n_targets dimensions.
BoResult optimize_targets(std::span<const Point2> points, const ensemble::Ensemble& ens,
                          const ensemble::Correspondence& corr, const BoConfig& config, const CoverageConfig& cov);

/// evaluation,phase,x1..x2np,sc,su,f
std::string trace_csv(const BoResult& result);

}  // namespace fairgen::bo
