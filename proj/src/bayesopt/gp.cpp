#include "bayesopt/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace fairgen::bo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double GpSurrogate::kernel(const VectorXd& a, const VectorXd& b) const {
  return signal_variance_ * std::exp(-0.5 * (a - b).squaredNorm() / (length_scale_ * length_scale_));
}

GpSurrogate GpSurrogate::fit(const MatrixXd& inputs, std::span<const double> values, double jitter) {
  const auto n = static_cast<std::size_t>(inputs.rows());
  require(n >= 2, ErrorCode::InvalidArgument, "GP fit needs at least two observations");
  require(values.size() == n, ErrorCode::InvalidArgument, "GP inputs and values differ in length");
  require(inputs.allFinite(), ErrorCode::Numeric, "GP inputs contain non-finite values");
  for (double v : values) require(std::isfinite(v), ErrorCode::Numeric, "GP values contain non-finite entries");

  GpSurrogate gp;
  gp.inputs_ = inputs;
  gp.jitter_ = jitter;

  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dists.push_back((inputs.row(static_cast<Eigen::Index>(i)) - inputs.row(static_cast<Eigen::Index>(j))).norm());
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  double median = *mid;
  if (dists.size() % 2 == 0) {
    const double lower = *std::max_element(dists.begin(), mid);
    median = 0.5 * (median + lower);
  }
  gp.length_scale_ = (std::isfinite(median) && median > 0.0) ? median : 1.0;

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  gp.signal_variance_ = (std::isfinite(var) && var > 0.0) ? var : 1.0;

  MatrixXd K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double k = gp.kernel(inputs.row(static_cast<Eigen::Index>(i)).transpose(),
                                 inputs.row(static_cast<Eigen::Index>(j)).transpose());
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k;
      K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k;
    }
    K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += jitter;
  }
  gp.chol_.compute(K);
  if (gp.chol_.info() != Eigen::Success) fail(ErrorCode::Numeric, "GP kernel matrix is not positive definite");
  VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = values[i];
  gp.alpha_ = gp.chol_.solve(y);
  return gp;
}

GpSurrogate::Prediction GpSurrogate::predict(const VectorXd& x) const {
  const auto n = inputs_.rows();
  VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k(i) = kernel(inputs_.row(i).transpose(), x);
  Prediction p;
  p.mean = k.dot(alpha_);
  const VectorXd v = chol_.matrixL().solve(k);
  p.variance = std::max(0.0, signal_variance_ - v.squaredNorm());
  return p;
}

double expected_improvement(double mean, double sigma, double best) {
  const double gain = mean - best;
  if (!(sigma > 0.0)) return std::max(gain, 0.0);
  const double z = gain / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(0.0, gain * cdf + sigma * pdf);
}

double expected_improvement(const GpSurrogate& gp, const VectorXd& x, double best) {
  const auto p = gp.predict(x);
  return expected_improvement(p.mean, std::sqrt(p.variance), best);
}

}  // namespace fairgen::bo
