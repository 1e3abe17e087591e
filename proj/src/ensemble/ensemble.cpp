#include "ensemble/ensemble.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "common/error.hpp"
#include "common/svg.hpp"
#include "common/text.hpp"
#include "ensemble/hungarian.hpp"

namespace fairgen::ensemble {

using Eigen::MatrixXd;

Ensemble train_ensemble(const MatrixXd& X, const MatrixXd& Y, const mdn::MdnConfig& config, std::size_t members,
                        std::uint64_t base_seed, bool parallel) {
  require(members >= 1, ErrorCode::InvalidArgument, "ensemble needs at least one member");
  Ensemble ens;
  ens.config = config;
  ens.members.resize(members);
  std::vector<std::exception_ptr> errors(members);

  auto train_member = [&](std::size_t m) {
    try {
      mdn::MdnConfig cfg = config;
      cfg.seed = base_seed + m;
      ens.members[m] = mdn::train(X, Y, cfg).model;
    } catch (...) {
      errors[m] = std::current_exception();
    }
  };
  if (parallel && members > 1) {
    std::vector<std::jthread> workers;
    workers.reserve(members);
    for (std::size_t m = 0; m < members; ++m) workers.emplace_back(train_member, m);
  } else {
    for (std::size_t m = 0; m < members; ++m) train_member(m);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return ens;
}

Ensemble train_ensemble(const Dataset& data, const mdn::MdnConfig& config, std::size_t members,
                        std::uint64_t base_seed, bool parallel) {
  const auto props = data.feasible_std_properties();
  const auto shapes = data.feasible_shapes();
  if (props.empty()) fail(ErrorCode::Training, "no feasible records to train on");
  return train_ensemble(mdn::to_matrix(props), mdn::to_matrix(shapes), config, members, base_seed, parallel);
}

Correspondence match_components(const Ensemble& ens, const MatrixXd& X_train) {
  require(ens.size() >= 1, ErrorCode::InvalidArgument, "empty ensemble");
  require(X_train.rows() >= 1, ErrorCode::InvalidArgument, "component matching needs training inputs");
  const std::size_t G = ens.components(), d = ens.output_dim();
  const auto n = static_cast<std::size_t>(X_train.rows());

  std::vector<mdn::MixtureParams> outs;
  outs.reserve(ens.size());
  for (const auto& m : ens.members) outs.push_back(m.forward(X_train));

  Correspondence corr;
  std::vector<std::size_t> identity(G);
  for (std::size_t g = 0; g < G; ++g) identity[g] = g;
  corr.maps.push_back(identity);
  corr.costs.push_back(0.0);
  const double scale = 1.0 / static_cast<double>(n * d);
  for (std::size_t m = 1; m < ens.size(); ++m) {
    MatrixXd cost = MatrixXd::Zero(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(G));
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t h = 0; h < G; ++h) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < d; ++j) {
            const double diff = outs[0].mean(i, g, j) - outs[m].mean(i, h, j);
            s += diff * diff;
          }
        cost(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) = s * scale;
      }
    }
    Assignment a = solve_assignment(cost);
    corr.maps.push_back(std::move(a.column_of_row));
    corr.costs.push_back(a.cost);
  }
  return corr;
}

double AggregatedMixture::total_variance() const {
  double s = 0.0;
  for (double v : variance) s += v;
  return s;
}

AggregatedMixture aggregate_moments(std::span<const std::vector<double>> means,
                                    std::span<const std::vector<double>> variances, std::size_t G, std::size_t d) {
  const std::size_t M = means.size();
  require(M >= 1 && variances.size() == M, ErrorCode::InvalidArgument, "aggregate needs matching member arrays");
  AggregatedMixture agg;
  agg.G = G;
  agg.d = d;
  agg.mean.assign(G * d, 0.0);
  agg.variance.assign(G * d, 0.0);
  const double inv_m = 1.0 / static_cast<double>(M);
  for (std::size_t k = 0; k < G * d; ++k) {
    double mu = 0.0;
    for (std::size_t m = 0; m < M; ++m) mu += means[m][k];
    mu *= inv_m;
    double var = 0.0, spread = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      var += variances[m][k];
      const double dm = means[m][k] - mu;
      spread += dm * dm;
    }
    agg.mean[k] = mu;
    agg.variance[k] = (var + spread) * inv_m;
  }
  return agg;
}

std::vector<AggregatedMixture> aggregate(const Ensemble& ens, const Correspondence& corr, const MatrixXd& X) {
  require(corr.maps.size() == ens.size(), ErrorCode::InvalidArgument, "correspondence does not match the ensemble");
  const std::size_t G = ens.components(), d = ens.output_dim(), M = ens.size();
  const auto n = static_cast<std::size_t>(X.rows());
  std::vector<mdn::MixtureParams> outs;
  outs.reserve(M);
  for (const auto& m : ens.members) outs.push_back(m.forward(X));

  std::vector<AggregatedMixture> result;
  result.reserve(n);
  std::vector<std::vector<double>> means(M, std::vector<double>(G * d)), vars(M, std::vector<double>(G * d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t g = 0; g < G; ++g) {
        const std::size_t src = corr.maps[m][g];
        for (std::size_t j = 0; j < d; ++j) {
          means[m][g * d + j] = outs[m].mean(i, src, j);
          vars[m][g * d + j] = outs[m].variance(i, src, j);
        }
      }
    }
    result.push_back(aggregate_moments(means, vars, G, d));
  }
  return result;
}

AggregatedMixture aggregate(const Ensemble& ens, const Correspondence& corr, std::span<const double> x) {
  MatrixXd X(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) X(0, static_cast<Eigen::Index>(j)) = x[j];
  return aggregate(ens, corr, X).front();
}

std::vector<double> uncertainty_scores(const Ensemble& ens, const Correspondence& corr, const MatrixXd& X) {
  std::vector<double> out;
  for (const auto& agg : aggregate(ens, corr, X)) out.push_back(agg.total_variance());
  return out;
}

double uncertainty_score(const Ensemble& ens, const Correspondence& corr, std::span<const double> x) {
  return aggregate(ens, corr, x).total_variance();
}

double batch_uncertainty(const Ensemble& ens, const Correspondence& corr, const MatrixXd& X) {
  require(X.rows() >= 1, ErrorCode::InvalidArgument, "empty target batch");
  double s = 0.0;
  for (double v : uncertainty_scores(ens, corr, X)) s += v;
  return s;
}

geom::Point2 UncertaintyField::point(std::size_t i, std::size_t j) const {
  const double step_x = box.width() / static_cast<double>(resolution - 1);
  const double step_y = box.height() / static_cast<double>(resolution - 1);
  return {box.xmin + static_cast<double>(i) * step_x, box.ymin + static_cast<double>(j) * step_y};
}

UncertaintyField heatmap(const Ensemble& ens, const Correspondence& corr, const geom::Box& box,
                         std::size_t resolution) {
  require(resolution >= 2, ErrorCode::InvalidArgument, "heatmap resolution must be >= 2 per axis");
  UncertaintyField field;
  field.box = box;
  field.resolution = resolution;
  MatrixXd X(static_cast<Eigen::Index>(resolution * resolution), 2);
  for (std::size_t j = 0; j < resolution; ++j)
    for (std::size_t i = 0; i < resolution; ++i) {
      const auto q = field.point(i, j);
      X(static_cast<Eigen::Index>(j * resolution + i), 0) = q.x;
      X(static_cast<Eigen::Index>(j * resolution + i), 1) = q.y;
    }
  field.values = uncertainty_scores(ens, corr, X);
  return field;
}

std::string heatmap_csv(const UncertaintyField& field) {
  std::ostringstream out;
  out << "xmin,ymin,xmax,ymax,resolution\n"
      << format_double(field.box.xmin) << ',' << format_double(field.box.ymin) << ',' << format_double(field.box.xmax)
      << ',' << format_double(field.box.ymax) << ',' << field.resolution << '\n'
      << "row,col,x,y,su\n";
  for (std::size_t j = 0; j < field.resolution; ++j)
    for (std::size_t i = 0; i < field.resolution; ++i) {
      const auto q = field.point(i, j);
      out << j << ',' << i << ',' << format_double(q.x) << ',' << format_double(q.y) << ','
          << format_double(field.at(i, j)) << '\n';
    }
  return out.str();
}

std::string heatmap_svg(const UncertaintyField& field, std::span<const geom::Point2> overlay, double pixels_per_unit) {
  SvgCanvas svg(field.box, pixels_per_unit);
  const auto [lo_it, hi_it] = std::minmax_element(field.values.begin(), field.values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  const double cw = field.box.width() / static_cast<double>(field.resolution - 1);
  const double ch = field.box.height() / static_cast<double>(field.resolution - 1);
  for (std::size_t j = 0; j < field.resolution; ++j) {
    for (std::size_t i = 0; i < field.resolution; ++i) {
      const double t = (field.at(i, j) - lo) / span;
      const int g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
      char style[64];
      std::snprintf(style, sizeof(style), "fill:rgb(255,%d,%d);stroke:none", g, g);
      const auto c = field.point(i, j);
      svg.rect({c.x - 0.5 * cw, c.y - 0.5 * ch, c.x + 0.5 * cw, c.y + 0.5 * ch}, style);
    }
  }
  for (const auto& p : overlay) svg.marker(p, "dot", 1.2, "black");
  char label[96];
  std::snprintf(label, sizeof(label), "S_U range [%.4g, %.4g]", lo, hi);
  svg.text(12.0, 16.0, label);
  return svg.str();
}

}  // namespace fairgen::ensemble
