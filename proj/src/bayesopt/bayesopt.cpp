#include "bayesopt/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bayesopt/gp.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"

namespace fairgen::bo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void BoConfig::validate() const {
  require(n_targets >= 1 && iterations >= 1 && random_walks >= 1 && init_batches >= 1 && candidates >= 1,
          ErrorCode::InvalidArgument, "BO counts must all be >= 1");
  require(std::isfinite(psi) && psi >= 0.0, ErrorCode::InvalidArgument, "uncertainty penalty psi must be >= 0");
}

TargetBatch unflatten(const VectorXd& x) {
  TargetBatch b;
  for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) b.push_back({x(i), x(i + 1)});
  return b;
}

VectorXd flatten(std::span<const Point2> batch) {
  VectorXd x(static_cast<Eigen::Index>(2 * batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    x(static_cast<Eigen::Index>(2 * i)) = batch[i].x;
    x(static_cast<Eigen::Index>(2 * i + 1)) = batch[i].y;
  }
  return x;
}

MatrixXd batch_matrix(std::span<const Point2> batch) {
  MatrixXd X(static_cast<Eigen::Index>(batch.size()), 2);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    X(static_cast<Eigen::Index>(i), 0) = batch[i].x;
    X(static_cast<Eigen::Index>(i), 1) = batch[i].y;
  }
  return X;
}

ObjectiveValue objective(std::span<const Point2> points, std::span<const Point2> batch,
                         const ensemble::Ensemble& ens, const ensemble::Correspondence& corr,
                         const CoverageConfig& cov, double psi) {
  require(!batch.empty(), ErrorCode::InvalidArgument, "empty target batch");
  for (const auto& q : batch) require(cov.box.contains(q), ErrorCode::Domain, "target outside the coverage box");
  std::vector<Point2> merged(points.begin(), points.end());
  merged.insert(merged.end(), batch.begin(), batch.end());
  ObjectiveValue v;
  v.coverage = coverage_score(merged, cov);
  v.uncertainty = ensemble::batch_uncertainty(ens, corr, batch_matrix(batch));
  v.f = v.coverage - psi * v.uncertainty;
  return v;
}

Box search_bounds(const CoverageConfig& cov) {
  Box b = cov.box;
  b.xmin += cov.rho;
  b.ymin += cov.rho;
  b.xmax -= cov.rho;
  b.ymax -= cov.rho;
  require(b.width() > 0.0 && b.height() > 0.0, ErrorCode::InvalidArgument, "coverage box is too small for rho");
  return b;
}

namespace {

VectorXd uniform_point(Rng& rng, const VectorXd& lo, const VectorXd& hi) {
  VectorXd x(lo.size());
  for (Eigen::Index j = 0; j < lo.size(); ++j) x(j) = rng.uniform(lo(j), hi(j));
  return x;
}

VectorXd perturbed(Rng& rng, const VectorXd& centre, const VectorXd& lo, const VectorXd& hi, double scale) {
  VectorXd x(centre.size());
  for (Eigen::Index j = 0; j < centre.size(); ++j)
    x(j) = std::clamp(centre(j) + scale * (hi(j) - lo(j)) * rng.normal(), lo(j), hi(j));
  return x;
}

// Best EI point: random candidates (half uniform, half near the best
// observations), then coordinate descent on the winner.
VectorXd maximize_ei(const GpSurrogate& gp, double best, std::span<const VectorXd> anchors, Rng& rng,
                     const VectorXd& lo, const VectorXd& hi, std::size_t candidates) {
  VectorXd x_best = uniform_point(rng, lo, hi);
  double ei_best = expected_improvement(gp, x_best, best);
  for (std::size_t c = 1; c < candidates; ++c) {
    VectorXd x = (c % 2 == 0 || anchors.empty()) ? uniform_point(rng, lo, hi)
                                                 : perturbed(rng, anchors[(c / 2) % anchors.size()], lo, hi, 0.1);
    const double ei = expected_improvement(gp, x, best);
    if (ei > ei_best) {
      ei_best = ei;
      x_best = std::move(x);
    }
  }

  const VectorXd range = hi - lo;
  double step = 0.05;
  for (int sweep = 0; sweep < 60 && step > 1e-4; ++sweep) {
    bool improved = false;
    for (Eigen::Index j = 0; j < x_best.size(); ++j) {
      for (double dir : {1.0, -1.0}) {
        VectorXd x = x_best;
        x(j) = std::clamp(x(j) + dir * step * range(j), lo(j), hi(j));
        const double ei = expected_improvement(gp, x, best);
        if (ei > ei_best) {
          ei_best = ei;
          x_best = std::move(x);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x_best;
}

}  // namespace

BoResult maximize(const std::function<ObjectiveValue(const VectorXd&)>& fn, const VectorXd& lo, const VectorXd& hi,
                  const BoConfig& config) {
  config.validate();
  const auto dim = static_cast<std::size_t>(lo.size());
  require(dim >= 1 && hi.size() == lo.size() && (hi.array() > lo.array()).all(), ErrorCode::InvalidArgument,
          "BO search bounds must be non-empty");
  BoResult res;
  auto record = [&](const std::string& phase, VectorXd x) {
    Evaluation e;
    e.index = res.trace.size();
    e.phase = phase;
    e.value = fn(x);
    e.x = std::move(x);
    if (res.trace.empty() || e.value.f > res.best.f) {
      res.best = e.value;
      res.best_x = e.x;
    }
    res.trace.push_back(std::move(e));
  };

  const auto design = lhs_sample(config.init_batches, derive_seed(config.seed, "bo-init"), dim);
  for (const auto& u : design) {
    VectorXd x(lo.size());
    for (std::size_t j = 0; j < dim; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      x(jj) = lo(jj) + u[j] * (hi(jj) - lo(jj));
    }
    record("init", std::move(x));
  }

  Rng rng(derive_seed(config.seed, "bo-acquire"));
  for (std::size_t round = 0; round < config.iterations; ++round) {
    MatrixXd inputs(static_cast<Eigen::Index>(res.trace.size()), lo.size());
    std::vector<double> values;
    values.reserve(res.trace.size());
    double centre = 0.0;
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      inputs.row(static_cast<Eigen::Index>(i)) = res.trace[i].x.transpose();
      values.push_back(res.trace[i].value.f);
      centre += res.trace[i].value.f;
    }
    // The surrogate has a zero prior mean; centring keeps unexplored regions
    // at the average observed value instead of at zero.
    centre /= static_cast<double>(values.size());
    for (double& v : values) v -= centre;
    const auto gp = GpSurrogate::fit(inputs, values);
    std::vector<std::size_t> order(res.trace.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t top = std::min<std::size_t>(5, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::size_t a, std::size_t b) { return res.trace[a].value.f > res.trace[b].value.f; });
    std::vector<VectorXd> anchors;
    for (std::size_t i = 0; i < top; ++i) anchors.push_back(res.trace[order[i]].x);
    record("ei", maximize_ei(gp, res.best.f - centre, anchors, rng, lo, hi, config.candidates));
  }

  Rng walk(derive_seed(config.seed, "bo-random"));
  for (std::size_t r = 0; r < config.random_walks; ++r) record("random", uniform_point(walk, lo, hi));
  return res;
}

BoResult optimize_targets(std::span<const Point2> points, const ensemble::Ensemble& ens,
                          const ensemble::Correspondence& corr, const BoConfig& config, const CoverageConfig& cov) {
  cov.validate();
  const Box sb = search_bounds(cov);
  const auto dim = static_cast<Eigen::Index>(2 * config.n_targets);
  VectorXd lo(dim), hi(dim);
  for (Eigen::Index i = 0; i < dim; i += 2) {
    lo(i) = sb.xmin;
    hi(i) = sb.xmax;
    lo(i + 1) = sb.ymin;
    hi(i + 1) = sb.ymax;
  }
  auto fn = [&](const VectorXd& x) { return objective(points, unflatten(x), ens, corr, cov, config.psi); };
  return maximize(fn, lo, hi, config);
}

std::string trace_csv(const BoResult& result) {
  std::ostringstream out;
  out << "evaluation,phase";
  const auto dim = result.trace.empty() ? 0 : result.trace.front().x.size();
  for (Eigen::Index j = 0; j < dim; ++j) out << ",x" << (j + 1);
  out << ",sc,su,f\n";
  for (const auto& e : result.trace) {
    out << e.index << ',' << e.phase;
    for (Eigen::Index j = 0; j < e.x.size(); ++j) out << ',' << format_double(e.x(j));
    out << ',' << format_double(e.value.coverage) << ',' << format_double(e.value.uncertainty) << ','
        << format_double(e.value.f) << '\n';
  }
  return out.str();
}

}  // namespace fairgen::bo
