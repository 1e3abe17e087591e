#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairgen {

using ShapeVector = std::vector<double>;
using PropertyVector = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// A design problem: shape space, simulator and manufacturability check.
struct ProblemSpec {
  std::string name;
  std::size_t d = 0;
  std::size_t p = 0;
  std::vector<Interval> shape_bounds;
  std::function<PropertyVector(std::span<const double>)> evaluate;
  std::function<bool(std::span<const double>)> feasible;

  bool in_bounds(std::span<const double> x) const;
  /// Clamps each coordinate into shape_bounds.
  void clamp(std::span<double> x) const;
};

// Built-in analytic problem: four normalized shape parameters, two properties
// (an EM-like and an MS-like response).
inline constexpr std::size_t kSyntheticShapeDim = 4;
inline constexpr std::size_t kSyntheticPropertyDim = 2;

/// p1 = exp(1.5 x1 x2) - x3^2, p2 = 2 x1^2 + x3 x4 + 0.3 sin(2 pi x2).
/// Throws ErrorCode::Domain for shapes outside [0,1]^4 or of the wrong length.
PropertyVector evaluate_synthetic(std::span<const double> x);
/// Inside [0,1]^4 and x2 + x3 <= 1.6 (thin-wall analog).
bool synthetic_feasible(std::span<const double> x);

const ProblemSpec& synthetic_problem();
/// Looks a problem up by name ("synthetic"); ErrorCode::InvalidArgument if unknown.
const ProblemSpec& problem_by_name(std::string_view name);

// Samplers work in the unit hypercube.

/// Full factorial grid, levels^d points, lexicographic order (last axis fastest).
/// levels == 1 yields the single centre point.
std::vector<ShapeVector> grid_sample(std::size_t levels, std::size_t d = kSyntheticShapeDim);

/// Latin hypercube: each axis has exactly one point per stratum [i/n, (i+1)/n).
std::vector<ShapeVector> lhs_sample(std::size_t n, std::uint64_t seed, std::size_t d = kSyntheticShapeDim);

/// Levels giving a grid closest to n points: round(n^(1/d)).
std::size_t grid_levels_nearest(std::size_t n, std::size_t d);
/// Smallest level count with levels^d >= n.
std::size_t grid_levels_covering(std::size_t n, std::size_t d);

/// Full grid in a seeded random order. Prefixes of this sequence are the
/// nested grid designs used for fixed-budget grid sampling.
std::vector<ShapeVector> shuffled_grid(std::size_t levels, std::uint64_t seed, std::size_t d = kSyntheticShapeDim);

/// Z-score transform of property vectors, fitted once and then frozen.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> mean, std::vector<double> stddev);

  /// Per-axis mean and population standard deviation.
  /// ErrorCode::DegenerateData if any axis has zero variance.
  static Standardizer fit(std::span<const PropertyVector> raw);

  PropertyVector apply(std::span<const double> raw) const;
  PropertyVector invert(std::span<const double> standardized) const;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return std_; }
  std::size_t dim() const { return mean_.size(); }

 private:
  std::vector<double> mean_;
  std::vector<double> std_;
};

}  // namespace fairgen
