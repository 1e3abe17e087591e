#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "problem/problem.hpp"

namespace fairgen::mdn {

struct MdnConfig {
  std::size_t hidden_layers = 6;
  std::size_t hidden_width = 64;
  std::size_t components = 10;
  std::size_t epochs = 3000;
  double learning_rate = 1e-3;
  double variance_floor = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-input Gaussian mixture over shape vectors, diagonal covariances.
struct MixtureParams {
  std::size_t n = 0;
  std::size_t G = 0;
  std::size_t d = 0;
  std::vector<double> weights;    // n x G, rows sum to 1
  std::vector<double> means;      // n x G x d
  std::vector<double> variances;  // n x G x d, >= variance floor

  double weight(std::size_t i, std::size_t g) const { return weights[i * G + g]; }
  double mean(std::size_t i, std::size_t g, std::size_t j) const { return means[(i * G + g) * d + j]; }
  double variance(std::size_t i, std::size_t g, std::size_t j) const { return variances[(i * G + g) * d + j]; }
};

/// Dense tanh network whose linear head emits G logits, G*d means and G*d
/// log-variances. All weights live in one flat vector, layer by layer: the
/// column-major weight matrix followed by the bias.
class MdnModel {
 public:
  struct LayerShape {
    std::size_t rows = 0;  // outputs
    std::size_t cols = 0;  // inputs
    std::size_t offset = 0;
  };

  MdnModel() = default;

  /// Glorot-uniform weights, zero biases.
  static MdnModel initialize(const MdnConfig& config, std::size_t input_dim, std::size_t output_dim,
                             std::uint64_t seed);

  const MdnConfig& config() const { return config_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  std::size_t components() const { return config_.components; }
  std::size_t head_size() const { return config_.components * (1 + 2 * output_dim_); }

  const std::vector<LayerShape>& layers() const { return layers_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::VectorXd& parameters() { return params_; }

  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t l) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t l) const;
  Eigen::Map<Eigen::MatrixXd> weight(std::size_t l);
  Eigen::Map<Eigen::VectorXd> bias(std::size_t l);

  /// Raw head outputs, one column per input row of X (n x p).
  Eigen::MatrixXd head_outputs(const Eigen::MatrixXd& X) const;

  /// ErrorCode::Domain for non-finite inputs or a wrong column count.
  MixtureParams forward(const Eigen::MatrixXd& X) const;
  MixtureParams forward(std::span<const double> x) const;

  /// Model whose component i is this model's component perm[i].
  MdnModel with_permuted_components(std::span<const std::size_t> perm) const;

  nlohmann::json to_json() const;
  static MdnModel from_json(const nlohmann::json& j);

 private:
  MdnConfig config_;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::vector<LayerShape> layers_;
  Eigen::VectorXd params_;
};

/// Converts head outputs into mixture parameters (softmax weights, floored
/// exponentiated log-variances).
MixtureParams mixture_from_head(const Eigen::MatrixXd& head, std::size_t G, std::size_t d, double variance_floor);

/// Mean over rows of -log sum_g pi_g prod_j N(y_j; mu_gj, var_gj), log-sum-exp stabilized.
double nll(const MixtureParams& params, const Eigen::MatrixXd& Y);

/// Exact gradient of nll(forward(X), Y) with respect to parameters().
/// Optionally reports the loss at the current weights.
Eigen::VectorXd gradients(const MdnModel& model, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          double* loss = nullptr);

struct TrainResult {
  MdnModel model;
  std::vector<double> loss_history;  // loss before each step, then the final loss
  double initial_nll = 0.0;
  double final_nll = 0.0;
};

/// Full-batch Adam for config.epochs steps from a config.seed initialization.
/// Rows are presented in a seed-dependent order. ErrorCode::Training when
/// there are fewer than 2*G rows or the loss becomes non-finite.
TrainResult train(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const MdnConfig& config);

/// Ancestral sampling; out-of-bounds draws are redrawn up to 20 times and
/// then clamped into the bounds.
std::vector<ShapeVector> sample_shapes(const MdnModel& model, std::span<const double> property, std::size_t count,
                                       std::uint64_t seed, std::span<const Interval> bounds);

inline constexpr int kMaxSampleAttempts = 20;

/// Row-per-sample matrix from a list of vectors.
Eigen::MatrixXd to_matrix(std::span<const std::vector<double>> rows);

}  // namespace fairgen::mdn
