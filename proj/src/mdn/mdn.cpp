#include "mdn/mdn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace fairgen::mdn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void MdnConfig::validate() const {
  require(components >= 1, ErrorCode::InvalidArgument, "MDN needs at least one mixture component");
  require(hidden_width >= 1, ErrorCode::InvalidArgument, "MDN hidden width must be >= 1");
  require(epochs >= 1, ErrorCode::InvalidArgument, "MDN epochs must be >= 1");
  require(std::isfinite(variance_floor) && variance_floor > 0.0, ErrorCode::InvalidArgument,
          "MDN variance floor must be > 0");
  require(std::isfinite(learning_rate) && learning_rate > 0.0, ErrorCode::InvalidArgument,
          "MDN learning rate must be > 0");
}

MdnModel MdnModel::initialize(const MdnConfig& config, std::size_t input_dim, std::size_t output_dim,
                              std::uint64_t seed) {
  config.validate();
  require(input_dim >= 1 && output_dim >= 1, ErrorCode::InvalidArgument, "MDN dimensions must be >= 1");
  MdnModel m;
  m.config_ = config;
  m.input_dim_ = input_dim;
  m.output_dim_ = output_dim;

  std::size_t in = input_dim, offset = 0;
  for (std::size_t l = 0; l <= config.hidden_layers; ++l) {
    const std::size_t out = l < config.hidden_layers ? config.hidden_width : m.head_size();
    m.layers_.push_back({out, in, offset});
    offset += out * in + out;
    in = out;
  }
  m.params_ = VectorXd::Zero(static_cast<Eigen::Index>(offset));

  Rng rng(seed);
  for (std::size_t l = 0; l < m.layers_.size(); ++l) {
    const auto& s = m.layers_[l];
    const double a = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
    auto W = m.weight(l);
    for (Eigen::Index c = 0; c < W.cols(); ++c)
      for (Eigen::Index r = 0; r < W.rows(); ++r) W(r, c) = rng.uniform(-a, a);
  }
  return m;
}

Eigen::Map<const MatrixXd> MdnModel::weight(std::size_t l) const {
  const auto& s = layers_[l];
  return {params_.data() + s.offset, static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols)};
}
Eigen::Map<const VectorXd> MdnModel::bias(std::size_t l) const {
  const auto& s = layers_[l];
  return {params_.data() + s.offset + s.rows * s.cols, static_cast<Eigen::Index>(s.rows)};
}
Eigen::Map<MatrixXd> MdnModel::weight(std::size_t l) {
  const auto& s = layers_[l];
  return {params_.data() + s.offset, static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols)};
}
Eigen::Map<VectorXd> MdnModel::bias(std::size_t l) {
  const auto& s = layers_[l];
  return {params_.data() + s.offset + s.rows * s.cols, static_cast<Eigen::Index>(s.rows)};
}

namespace {

void check_inputs(const MatrixXd& X, std::size_t p) {
  require(static_cast<std::size_t>(X.cols()) == p, ErrorCode::Domain, "MDN input has the wrong number of columns");
  require(X.allFinite(), ErrorCode::Domain, "MDN input contains non-finite values");
}

// Forward pass that keeps every layer's activation (column per sample).
std::vector<MatrixXd> forward_activations(const MdnModel& m, const MatrixXd& X) {
  std::vector<MatrixXd> acts;
  acts.reserve(m.layers().size() + 1);
  acts.push_back(X.transpose());
  const std::size_t L = m.layers().size();
  for (std::size_t l = 0; l < L; ++l) {
    MatrixXd z = m.weight(l) * acts.back();
    z.colwise() += m.bias(l);
    if (l + 1 < L) z = z.array().tanh().matrix();
    acts.push_back(std::move(z));
  }
  return acts;
}

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2 pi)

}  // namespace

MatrixXd MdnModel::head_outputs(const MatrixXd& X) const {
  check_inputs(X, input_dim_);
  return forward_activations(*this, X).back();
}

MixtureParams mixture_from_head(const MatrixXd& head, std::size_t G, std::size_t d, double variance_floor) {
  MixtureParams mp;
  mp.n = static_cast<std::size_t>(head.cols());
  mp.G = G;
  mp.d = d;
  mp.weights.resize(mp.n * G);
  mp.means.resize(mp.n * G * d);
  mp.variances.resize(mp.n * G * d);
  for (std::size_t i = 0; i < mp.n; ++i) {
    const auto col = head.col(static_cast<Eigen::Index>(i));
    const double amax = col.head(static_cast<Eigen::Index>(G)).maxCoeff();
    double z = 0.0;
    for (std::size_t g = 0; g < G; ++g) z += std::exp(col(static_cast<Eigen::Index>(g)) - amax);
    for (std::size_t g = 0; g < G; ++g)
      mp.weights[i * G + g] = std::exp(col(static_cast<Eigen::Index>(g)) - amax) / z;
    for (std::size_t k = 0; k < G * d; ++k) {
      mp.means[i * G * d + k] = col(static_cast<Eigen::Index>(G + k));
      mp.variances[i * G * d + k] = std::max(std::exp(col(static_cast<Eigen::Index>(G + G * d + k))), variance_floor);
    }
  }
  return mp;
}

MixtureParams MdnModel::forward(const MatrixXd& X) const {
  return mixture_from_head(head_outputs(X), config_.components, output_dim_, config_.variance_floor);
}

MixtureParams MdnModel::forward(std::span<const double> x) const {
  MatrixXd X(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) X(0, static_cast<Eigen::Index>(j)) = x[j];
  return forward(X);
}

MdnModel MdnModel::with_permuted_components(std::span<const std::size_t> perm) const {
  const std::size_t G = config_.components, d = output_dim_;
  require(perm.size() == G, ErrorCode::InvalidArgument, "component permutation has the wrong length");
  MdnModel out = *this;
  const std::size_t L = layers_.size() - 1;
  auto src_w = weight(L);
  auto src_b = bias(L);
  auto dst_w = out.weight(L);
  auto dst_b = out.bias(L);
  auto copy_row = [&](std::size_t dst, std::size_t src) {
    dst_w.row(static_cast<Eigen::Index>(dst)) = src_w.row(static_cast<Eigen::Index>(src));
    dst_b(static_cast<Eigen::Index>(dst)) = src_b(static_cast<Eigen::Index>(src));
  };
  for (std::size_t i = 0; i < G; ++i) {
    const std::size_t g = perm[i];
    require(g < G, ErrorCode::InvalidArgument, "component permutation entry out of range");
    copy_row(i, g);
    for (std::size_t j = 0; j < d; ++j) {
      copy_row(G + i * d + j, G + g * d + j);
      copy_row(G + G * d + i * d + j, G + G * d + g * d + j);
    }
  }
  return out;
}

nlohmann::json MdnModel::to_json() const {
  nlohmann::json j;
  j["format"] = "fairgen-mdn-1";
  j["config"] = {{"hidden_layers", config_.hidden_layers}, {"hidden_width", config_.hidden_width},
                 {"components", config_.components},       {"epochs", config_.epochs},
                 {"learning_rate", config_.learning_rate}, {"variance_floor", config_.variance_floor},
                 {"seed", config_.seed}};
  j["input_dim"] = input_dim_;
  j["output_dim"] = output_dim_;
  auto& layers = j["layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& s = layers_[l];
    std::vector<double> w(params_.data() + s.offset, params_.data() + s.offset + s.rows * s.cols);
    std::vector<double> b(params_.data() + s.offset + s.rows * s.cols,
                          params_.data() + s.offset + s.rows * s.cols + s.rows);
    layers.push_back({{"rows", s.rows}, {"cols", s.cols}, {"weights", w}, {"bias", b}});
  }
  return j;
}

MdnModel MdnModel::from_json(const nlohmann::json& j) {
  try {
    require(j.at("format") == "fairgen-mdn-1", ErrorCode::Parse, "unknown MDN checkpoint format");
    const auto& c = j.at("config");
    MdnConfig cfg;
    cfg.hidden_layers = c.at("hidden_layers");
    cfg.hidden_width = c.at("hidden_width");
    cfg.components = c.at("components");
    cfg.epochs = c.at("epochs");
    cfg.learning_rate = c.at("learning_rate");
    cfg.variance_floor = c.at("variance_floor");
    cfg.seed = c.at("seed");
    MdnModel m = initialize(cfg, j.at("input_dim"), j.at("output_dim"), 0);
    const auto& layers = j.at("layers");
    require(layers.size() == m.layers_.size(), ErrorCode::Parse, "MDN checkpoint has the wrong layer count");
    for (std::size_t l = 0; l < m.layers_.size(); ++l) {
      const auto& s = m.layers_[l];
      auto w = layers[l].at("weights").get<std::vector<double>>();
      auto b = layers[l].at("bias").get<std::vector<double>>();
      require(layers[l].at("rows") == s.rows && layers[l].at("cols") == s.cols && w.size() == s.rows * s.cols &&
                  b.size() == s.rows,
              ErrorCode::Parse, "MDN checkpoint layer shape mismatch");
      std::copy(w.begin(), w.end(), m.params_.data() + s.offset);
      std::copy(b.begin(), b.end(), m.params_.data() + s.offset + w.size());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("MDN checkpoint: ") + e.what());
  }
}

double nll(const MixtureParams& mp, const MatrixXd& Y) {
  require(static_cast<std::size_t>(Y.rows()) == mp.n && static_cast<std::size_t>(Y.cols()) == mp.d,
          ErrorCode::InvalidArgument, "nll: target shape mismatch");
  require(Y.allFinite(), ErrorCode::Domain, "nll: non-finite targets");
  std::vector<double> lg(mp.G);
  double total = 0.0;
  for (std::size_t i = 0; i < mp.n; ++i) {
    for (std::size_t g = 0; g < mp.G; ++g) {
      double s = std::log(mp.weight(i, g));
      for (std::size_t j = 0; j < mp.d; ++j) {
        const double v = mp.variance(i, g, j);
        const double r = Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - mp.mean(i, g, j);
        s += -0.5 * (kLog2Pi + std::log(v)) - 0.5 * r * r / v;
      }
      lg[g] = s;
    }
    const double mx = *std::max_element(lg.begin(), lg.end());
    double acc = 0.0;
    for (double v : lg) acc += std::exp(v - mx);
    total += -(mx + std::log(acc));
  }
  return total / static_cast<double>(mp.n);
}

VectorXd gradients(const MdnModel& model, const MatrixXd& X, const MatrixXd& Y, double* loss) {
  check_inputs(X, model.input_dim());
  const std::size_t n = static_cast<std::size_t>(X.rows());
  const std::size_t G = model.components(), d = model.output_dim();
  require(n >= 1 && static_cast<std::size_t>(Y.rows()) == n && static_cast<std::size_t>(Y.cols()) == d,
          ErrorCode::InvalidArgument, "gradients: target shape mismatch");
  const double floor = model.config().variance_floor;

  auto acts = forward_activations(model, X);
  const MatrixXd& head = acts.back();
  MatrixXd dhead(head.rows(), head.cols());

  std::vector<double> logpi(G), lg(G);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto col = head.col(ii);
    double amax = col(0);
    for (std::size_t g = 1; g < G; ++g) amax = std::max(amax, col(static_cast<Eigen::Index>(g)));
    double z = 0.0;
    for (std::size_t g = 0; g < G; ++g) z += std::exp(col(static_cast<Eigen::Index>(g)) - amax);
    const double logz = amax + std::log(z);
    for (std::size_t g = 0; g < G; ++g) {
      logpi[g] = col(static_cast<Eigen::Index>(g)) - logz;
      double s = logpi[g];
      for (std::size_t j = 0; j < d; ++j) {
        const auto mrow = static_cast<Eigen::Index>(G + g * d + j);
        const auto srow = static_cast<Eigen::Index>(G + G * d + g * d + j);
        const double v = std::max(std::exp(col(srow)), floor);
        const double r = Y(ii, static_cast<Eigen::Index>(j)) - col(mrow);
        s += -0.5 * (kLog2Pi + std::log(v)) - 0.5 * r * r / v;
      }
      lg[g] = s;
    }
    const double mx = *std::max_element(lg.begin(), lg.end());
    double acc = 0.0;
    for (double v : lg) acc += std::exp(v - mx);
    const double lse = mx + std::log(acc);
    total -= lse;

    for (std::size_t g = 0; g < G; ++g) {
      const double resp = std::exp(lg[g] - lse);
      dhead(static_cast<Eigen::Index>(g), ii) = std::exp(logpi[g]) - resp;
      for (std::size_t j = 0; j < d; ++j) {
        const auto mrow = static_cast<Eigen::Index>(G + g * d + j);
        const auto srow = static_cast<Eigen::Index>(G + G * d + g * d + j);
        const double ev = std::exp(col(srow));
        const double v = std::max(ev, floor);
        const double r = Y(ii, static_cast<Eigen::Index>(j)) - col(mrow);
        dhead(mrow, ii) = -resp * r / v;
        dhead(srow, ii) = ev > floor ? resp * (0.5 - 0.5 * r * r / v) : 0.0;
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (loss) *loss = total * inv_n;
  dhead *= inv_n;

  VectorXd grad = VectorXd::Zero(model.parameters().size());
  MatrixXd delta = std::move(dhead);
  for (std::size_t l = model.layers().size(); l-- > 0;) {
    const auto& s = model.layers()[l];
    Eigen::Map<MatrixXd> gw(grad.data() + s.offset, static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols));
    Eigen::Map<VectorXd> gb(grad.data() + s.offset + s.rows * s.cols, static_cast<Eigen::Index>(s.rows));
    gw.noalias() = delta * acts[l].transpose();
    gb = delta.rowwise().sum();
    if (l == 0) break;
    MatrixXd back = model.weight(l).transpose() * delta;
    // acts[l] holds tanh outputs of layer l-1.
    delta = (back.array() * (1.0 - acts[l].array().square())).matrix();
  }
  return grad;
}

Eigen::MatrixXd to_matrix(std::span<const std::vector<double>> rows) {
  if (rows.empty()) return {};
  MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == rows.front().size(), ErrorCode::InvalidArgument, "ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return M;
}

namespace {

// Starts each component's mean at a distinct training target and every
// log-variance at the target variance, so components do not begin coincident.
void seed_head_biases(MdnModel& model, const MatrixXd& Y, std::uint64_t seed) {
  const std::size_t G = model.components(), d = model.output_dim();
  const auto n = static_cast<std::size_t>(Y.rows());
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(rows));
  auto b = model.bias(model.layers().size() - 1);
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = Y.col(static_cast<Eigen::Index>(j));
    const double var = (col.array() - col.mean()).square().mean();
    const double logvar = std::log(std::max(var, model.config().variance_floor));
    for (std::size_t g = 0; g < G; ++g) {
      b(static_cast<Eigen::Index>(G + g * d + j)) = col(static_cast<Eigen::Index>(rows[g % n]));
      b(static_cast<Eigen::Index>(G + G * d + g * d + j)) = logvar;
    }
  }
}

}  // namespace

TrainResult train(const MatrixXd& X, const MatrixXd& Y, const MdnConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(X.rows());
  require(static_cast<std::size_t>(Y.rows()) == n, ErrorCode::InvalidArgument, "train: X and Y row counts differ");
  if (n < 2 * config.components)
    fail(ErrorCode::Training, "MDN training needs at least " + std::to_string(2 * config.components) + " records, got " +
                                  std::to_string(n));

  // Member-specific presentation order of the rows.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng shuffle_rng(derive_seed(config.seed, "mdn-shuffle"));
  shuffle_rng.shuffle(std::span<Eigen::Index>(order));
  MatrixXd Xs(X.rows(), X.cols()), Ys(Y.rows(), Y.cols());
  for (std::size_t i = 0; i < n; ++i) {
    Xs.row(static_cast<Eigen::Index>(i)) = X.row(order[i]);
    Ys.row(static_cast<Eigen::Index>(i)) = Y.row(order[i]);
  }

  TrainResult res;
  res.model = MdnModel::initialize(config, static_cast<std::size_t>(X.cols()), static_cast<std::size_t>(Y.cols()),
                                   derive_seed(config.seed, "mdn-init"));
  seed_head_biases(res.model, Ys, derive_seed(config.seed, "mdn-head"));
  auto& theta = res.model.parameters();

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  VectorXd m1 = VectorXd::Zero(theta.size()), m2 = VectorXd::Zero(theta.size());
  double b1t = 1.0, b2t = 1.0;
  res.loss_history.reserve(config.epochs + 1);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = 0.0;
    const VectorXd g = gradients(res.model, Xs, Ys, &loss);
    if (!std::isfinite(loss) || !g.allFinite())
      fail(ErrorCode::Training, "MDN loss became non-finite at epoch " + std::to_string(epoch));
    res.loss_history.push_back(loss);
    b1t *= beta1;
    b2t *= beta2;
    m1 = beta1 * m1 + (1.0 - beta1) * g;
    m2 = beta2 * m2 + (1.0 - beta2) * g.cwiseProduct(g);
    const double lr_t = config.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
    theta.array() -= lr_t * m1.array() / (m2.array().sqrt() + eps * std::sqrt(1.0 - b2t));
  }
  const double final_loss = nll(res.model.forward(Xs), Ys);
  if (!std::isfinite(final_loss)) fail(ErrorCode::Training, "MDN final loss is non-finite");
  res.loss_history.push_back(final_loss);
  res.initial_nll = res.loss_history.front();
  res.final_nll = final_loss;
  return res;
}

std::vector<ShapeVector> sample_shapes(const MdnModel& model, std::span<const double> property, std::size_t count,
                                       std::uint64_t seed, std::span<const Interval> bounds) {
  require(count >= 1, ErrorCode::InvalidArgument, "sample count must be >= 1");
  const std::size_t d = model.output_dim(), G = model.components();
  require(bounds.size() == d, ErrorCode::InvalidArgument, "shape bounds have the wrong dimension");
  const MixtureParams mp = model.forward(property);
  std::vector<double> cdf(G);
  std::partial_sum(mp.weights.begin(), mp.weights.end(), cdf.begin());

  Rng rng(seed);
  std::vector<ShapeVector> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    ShapeVector x(d);
    bool inside = false;
    for (int attempt = 0; attempt < kMaxSampleAttempts && !inside; ++attempt) {
      const double u = rng.uniform() * cdf.back();
      const std::size_t g = std::min<std::size_t>(
          static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), G - 1);
      inside = true;
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = mp.mean(0, g, j) + std::sqrt(mp.variance(0, g, j)) * rng.normal();
        inside = inside && x[j] >= bounds[j].lo && x[j] <= bounds[j].hi;
      }
    }
    if (!inside)
      for (std::size_t j = 0; j < d; ++j) x[j] = std::clamp(x[j], bounds[j].lo, bounds[j].hi);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace fairgen::mdn
