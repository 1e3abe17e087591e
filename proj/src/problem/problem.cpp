#include "problem/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace fairgen {

bool ProblemSpec::in_bounds(std::span<const double> x) const {
  if (x.size() != d) return false;
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(x[j]) || x[j] < shape_bounds[j].lo || x[j] > shape_bounds[j].hi) return false;
  }
  return true;
}

void ProblemSpec::clamp(std::span<double> x) const {
  for (std::size_t j = 0; j < x.size() && j < d; ++j) x[j] = std::clamp(x[j], shape_bounds[j].lo, shape_bounds[j].hi);
}

namespace {

bool in_unit_cube(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; });
}

}  // namespace

PropertyVector evaluate_synthetic(std::span<const double> x) {
  require(x.size() == kSyntheticShapeDim, ErrorCode::Domain, "synthetic problem expects a 4-dimensional shape");
  require(in_unit_cube(x), ErrorCode::Domain, "shape outside [0,1]^4");
  const double p1 = std::exp(1.5 * x[0] * x[1]) - x[2] * x[2];
  const double p2 = 2.0 * x[0] * x[0] + x[2] * x[3] + 0.3 * std::sin(2.0 * std::numbers::pi * x[1]);
  return {p1, p2};
}

bool synthetic_feasible(std::span<const double> x) {
  return x.size() == kSyntheticShapeDim && in_unit_cube(x) && x[1] + x[2] <= 1.6;
}

const ProblemSpec& synthetic_problem() {
  static const ProblemSpec spec = [] {
    ProblemSpec s;
    s.name = "synthetic";
    s.d = kSyntheticShapeDim;
    s.p = kSyntheticPropertyDim;
    s.shape_bounds.assign(kSyntheticShapeDim, Interval{0.0, 1.0});
    s.evaluate = evaluate_synthetic;
    s.feasible = synthetic_feasible;
    return s;
  }();
  return spec;
}

const ProblemSpec& problem_by_name(std::string_view name) {
  if (name == "synthetic") return synthetic_problem();
  fail(ErrorCode::InvalidArgument, "unknown problem '" + std::string(name) + "'");
}

std::vector<ShapeVector> grid_sample(std::size_t levels, std::size_t d) {
  require(levels >= 1, ErrorCode::InvalidArgument, "grid levels must be >= 1");
  std::vector<double> axis(levels);
  if (levels == 1) {
    axis[0] = 0.5;
  } else {
    for (std::size_t i = 0; i < levels; ++i) axis[i] = static_cast<double>(i) / static_cast<double>(levels - 1);
  }
  std::size_t count = 1;
  for (std::size_t j = 0; j < d; ++j) count *= levels;

  std::vector<ShapeVector> out;
  out.reserve(count);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t c = 0; c < count; ++c) {
    ShapeVector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = axis[idx[j]];
    out.push_back(std::move(x));
    for (std::size_t j = d; j-- > 0;) {
      if (++idx[j] < levels) break;
      idx[j] = 0;
    }
  }
  return out;
}

std::vector<ShapeVector> lhs_sample(std::size_t n, std::uint64_t seed, std::size_t d) {
  require(n >= 1, ErrorCode::InvalidArgument, "LHS sample count must be >= 1");
  Rng rng(seed);
  std::vector<ShapeVector> out(n, ShapeVector(d));
  std::vector<std::size_t> strata(n);
  const auto nd = static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(strata));
    for (std::size_t i = 0; i < n; ++i) {
      const auto s = static_cast<double>(strata[i]);
      // Keep rounding from pushing a draw across a stratum edge.
      const double lo = s / nd;
      const double hi = std::nextafter((s + 1.0) / nd, 0.0);
      out[i][j] = std::clamp((s + rng.uniform()) / nd, lo, hi);
    }
  }
  return out;
}

namespace {

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

std::size_t grid_levels_nearest(std::size_t n, std::size_t d) {
  require(n >= 1 && d >= 1, ErrorCode::InvalidArgument, "grid size must be >= 1");
  auto levels = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d))));
  return std::max<std::size_t>(levels, 1);
}

std::size_t grid_levels_covering(std::size_t n, std::size_t d) {
  require(n >= 1 && d >= 1, ErrorCode::InvalidArgument, "grid size must be >= 1");
  std::size_t levels = 1;
  while (ipow(levels, d) < n) ++levels;
  return levels;
}

std::vector<ShapeVector> shuffled_grid(std::size_t levels, std::uint64_t seed, std::size_t d) {
  auto grid = grid_sample(levels, d);
  Rng rng(seed);
  rng.shuffle(std::span<ShapeVector>(grid));
  return grid;
}

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> stddev)
    : mean_(std::move(mean)), std_(std::move(stddev)) {
  require(mean_.size() == std_.size(), ErrorCode::InvalidArgument, "standardizer mean/std size mismatch");
  for (double s : std_) require(std::isfinite(s) && s > 0.0, ErrorCode::DegenerateData, "standardizer std must be > 0");
}

Standardizer Standardizer::fit(std::span<const PropertyVector> raw) {
  require(raw.size() >= 2, ErrorCode::DegenerateData, "standardizer needs at least two property vectors");
  const std::size_t p = raw.front().size();
  std::vector<double> mean(p, 0.0), var(p, 0.0);
  for (const auto& v : raw) {
    require(v.size() == p, ErrorCode::InvalidArgument, "property vectors differ in length");
    for (std::size_t j = 0; j < p; ++j) mean[j] += v[j];
  }
  for (auto& m : mean) m /= static_cast<double>(raw.size());
  for (const auto& v : raw)
    for (std::size_t j = 0; j < p; ++j) var[j] += (v[j] - mean[j]) * (v[j] - mean[j]);
  std::vector<double> sd(p);
  for (std::size_t j = 0; j < p; ++j) {
    sd[j] = std::sqrt(var[j] / static_cast<double>(raw.size()));
    if (!(sd[j] > 0.0)) fail(ErrorCode::DegenerateData, "property axis " + std::to_string(j + 1) + " has zero variance");
  }
  return Standardizer(std::move(mean), std::move(sd));
}

PropertyVector Standardizer::apply(std::span<const double> raw) const {
  require(raw.size() == mean_.size(), ErrorCode::InvalidArgument, "property dimension mismatch");
  PropertyVector out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) out[j] = (raw[j] - mean_[j]) / std_[j];
  return out;
}

PropertyVector Standardizer::invert(std::span<const double> standardized) const {
  require(standardized.size() == mean_.size(), ErrorCode::InvalidArgument, "property dimension mismatch");
  PropertyVector out(standardized.size());
  for (std::size_t j = 0; j < standardized.size(); ++j) out[j] = standardized[j] * std_[j] + mean_[j];
  return out;
}

}  // namespace fairgen
