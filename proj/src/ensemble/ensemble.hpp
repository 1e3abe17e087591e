#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coverage/geometry.hpp"
#include "mdn/mdn.hpp"
#include "problem/dataset.hpp"

namespace fairgen::ensemble {

/// M independently seeded MDNs sharing (p, d, G).
struct Ensemble {
  mdn::MdnConfig config;
  std::vector<mdn::MdnModel> members;

  std::size_t size() const { return members.size(); }
  std::size_t components() const { return config.components; }
  std::size_t input_dim() const { return members.empty() ? 0 : members.front().input_dim(); }
  std::size_t output_dim() const { return members.empty() ? 0 : members.front().output_dim(); }
};

/// Member m (0-based) trains with seed base_seed + m. Members train on
/// separate threads when `parallel` is set; results do not depend on it.
Ensemble train_ensemble(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const mdn::MdnConfig& config,
                        std::size_t members, std::uint64_t base_seed, bool parallel = true);

/// Trains on the feasible records: standardized properties -> shapes.
Ensemble train_ensemble(const Dataset& data, const mdn::MdnConfig& config, std::size_t members,
                        std::uint64_t base_seed, bool parallel = true);

/// maps[m][g] is the component of member m aligned with component g of
/// member 0 (maps[0] is the identity). costs[m] is the optimal total cost.
struct Correspondence {
  std::vector<std::vector<std::size_t>> maps;
  std::vector<double> costs;
};

/// For each member m >= 1 solves the G x G assignment whose cost is the mean
/// squared difference between member 0's component-g mean matrix and member
/// m's component-g' mean matrix over the training inputs.
Correspondence match_components(const Ensemble& ens, const Eigen::MatrixXd& X_train);

/// Per aligned component: mean and variance (d values each) of the
/// equally weighted mixture of the members' Gaussians.
struct AggregatedMixture {
  std::size_t G = 0;
  std::size_t d = 0;
  std::vector<double> mean;      // G x d
  std::vector<double> variance;  // G x d, >= 0

  double mean_at(std::size_t g, std::size_t j) const { return mean[g * d + j]; }
  double variance_at(std::size_t g, std::size_t j) const { return variance[g * d + j]; }
  double total_variance() const;
};

/// Moments from per-member (mean, variance) arrays: members x G x d, already
/// aligned. variance* = mean(var) + mean((mu - mu*)^2), the centred form of
/// M^-1 sum(var + mu^2) - mu*^2.
AggregatedMixture aggregate_moments(std::span<const std::vector<double>> means,
                                    std::span<const std::vector<double>> variances, std::size_t G, std::size_t d);

AggregatedMixture aggregate(const Ensemble& ens, const Correspondence& corr, std::span<const double> x);
std::vector<AggregatedMixture> aggregate(const Ensemble& ens, const Correspondence& corr, const Eigen::MatrixXd& X);

/// S_U(x): aggregated variances summed over components and dimensions.
double uncertainty_score(const Ensemble& ens, const Correspondence& corr, std::span<const double> x);
/// S_U at each row of X.
std::vector<double> uncertainty_scores(const Ensemble& ens, const Correspondence& corr, const Eigen::MatrixXd& X);
/// Sum of S_U over a batch of property points (rows of X).
double batch_uncertainty(const Ensemble& ens, const Correspondence& corr, const Eigen::MatrixXd& X);

/// S_U sampled on a resolution x resolution lattice spanning the box
/// (endpoints included). values[j * resolution + i] sits at (x_i, y_j).
struct UncertaintyField {
  geom::Box box;
  std::size_t resolution = 0;
  std::vector<double> values;

  geom::Point2 point(std::size_t i, std::size_t j) const;
  double at(std::size_t i, std::size_t j) const { return values[j * resolution + i]; }
};

/// ErrorCode::InvalidArgument if resolution < 2.
UncertaintyField heatmap(const Ensemble& ens, const Correspondence& corr, const geom::Box& box, std::size_t resolution);

std::string heatmap_csv(const UncertaintyField& field);
/// Linear white-to-red ramp between the field's min and max.
std::string heatmap_svg(const UncertaintyField& field, std::span<const geom::Point2> overlay = {},
                        double pixels_per_unit = 80.0);

}  // namespace fairgen::ensemble
