#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "problem/problem.hpp"

namespace fairgen {

struct DesignRecord {
  ShapeVector shape;
  PropertyVector raw_properties;
  PropertyVector std_properties;
  std::string provenance;  // init-grid | init-lhs | fairgen-iter-<i>
  bool feasible = true;
};

/// The growing design dataset. Only feasible records are "active": they are
/// what coverage scoring and model training see.
struct Dataset {
  std::string problem_id;
  std::size_t d = 0;
  std::size_t p = 0;
  Standardizer standardizer;
  std::uint64_t seed = 0;
  std::vector<DesignRecord> records;

  std::size_t size() const { return records.size(); }
  std::size_t feasible_count() const;
  std::vector<PropertyVector> feasible_std_properties() const;
  std::vector<ShapeVector> feasible_shapes() const;

  /// Simulates and standardizes a feasible shape and appends it.
  void append(const ProblemSpec& problem, ShapeVector shape, std::string provenance);
};

std::string init_provenance(std::string_view sampler);
std::string iteration_provenance(std::size_t iteration);
/// Iteration index encoded in a fairgen-iter-<i> tag, nullopt for init tags.
std::optional<std::size_t> provenance_iteration(std::string_view tag);

/// Simulates every shape, flags infeasible ones, and fits the standardizer on
/// the feasible raw properties.
Dataset build_initial_dataset(const ProblemSpec& problem, std::span<const ShapeVector> shapes,
                              const std::string& provenance, std::uint64_t seed);

/// Dataset from the named sampler: "grid" uses levels = round(n^(1/d)) so the
/// actual count is levels^d; "lhs" produces exactly n designs.
Dataset initialize_dataset(const ProblemSpec& problem, std::string_view sampler, std::size_t n, std::uint64_t seed);

/// CSV rows plus a JSON sidecar (same stem, .json extension).
void save_dataset(const Dataset& data, const std::filesystem::path& csv_path);
Dataset load_dataset(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

std::string dataset_csv(const Dataset& data);

}  // namespace fairgen
