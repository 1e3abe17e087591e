#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fairgen::bo {

/// Zero-mean Gaussian process with a squared-exponential kernel.
/// Hyperparameters are set from the data, not fitted: the length scale is the
/// median pairwise input distance, the signal variance the sample variance
/// of the observed values (1.0 when either is degenerate).
class GpSurrogate {
 public:
  struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
  };

  /// inputs: one row per observation. ErrorCode::InvalidArgument for fewer
  /// than two observations, ErrorCode::Numeric if the jittered kernel matrix
  /// is not positive definite.
  static GpSurrogate fit(const Eigen::MatrixXd& inputs, std::span<const double> values, double jitter = 1e-6);

  Prediction predict(const Eigen::VectorXd& x) const;

  double length_scale() const { return length_scale_; }
  double signal_variance() const { return signal_variance_; }
  double jitter() const { return jitter_; }
  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }

 private:
  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  Eigen::MatrixXd inputs_;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double length_scale_ = 1.0;
  double signal_variance_ = 1.0;
  double jitter_ = 1e-6;
};

/// Closed-form EI for maximization; max(mean - best, 0) when sigma == 0.
double expected_improvement(double mean, double sigma, double best);
double expected_improvement(const GpSurrogate& gp, const Eigen::VectorXd& x, double best);

}  // namespace fairgen::bo
