#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bayesopt/bayesopt.hpp"
#include "pipeline/config.hpp"
#include "problem/dataset.hpp"

namespace fairgen {

/// Wall-clock seconds per phase. Kept out of the ledger so that ledgers of
/// identical runs compare equal byte for byte.
struct PhaseTimes {
  double train = 0.0;
  double match = 0.0;
  double optimize = 0.0;
  double generate = 0.0;
  double simulate = 0.0;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::uint64_t seed = 0;
  double sc_before = 0.0;
  double sc_after = 0.0;
  std::vector<Point2> targets;
  double su_targets = 0.0;
  double objective = 0.0;
  std::size_t generated = 0;
  std::size_t infeasible = 0;
  std::size_t outliers = 0;
  std::size_t appended = 0;
  std::size_t dataset_size = 0;
  PhaseTimes times;

  nlohmann::json to_json() const;
  static IterationRecord from_json(const nlohmann::json& j);
  nlohmann::json timings_json() const;
};

/// Extra outputs of one iteration, used for plots and traces.
struct IterationArtifacts {
  bo::BoResult bo;
  std::vector<Point2> previous_points;  // active property points before the iteration
  std::vector<Point2> appended_points;
};

/// One FairGen step on `data`: train the ensemble, match components, pick
/// targets by BO, sample n_p x samples x M shapes, drop infeasible shapes,
/// simulate, drop outliers (standardized properties outside the coverage
/// box) and append the rest tagged fairgen-iter-<iteration>. The dataset is
/// only modified once everything before the append has succeeded.
IterationRecord run_iteration(Dataset& data, const RunConfig& config, std::size_t iteration,
                              std::uint64_t iteration_seed, IterationArtifacts* artifacts = nullptr);
/// Same, with an explicit problem instead of the one named by the dataset.
IterationRecord run_iteration(const ProblemSpec& problem, Dataset& data, const RunConfig& config,
                              std::size_t iteration, std::uint64_t iteration_seed,
                              IterationArtifacts* artifacts = nullptr);

/// Iteration i (1-based) runs with seed master_seed ^ i.
std::uint64_t iteration_seed(std::uint64_t master_seed, std::size_t iteration);

struct RunLedger {
  std::vector<IterationRecord> records;
  nlohmann::json config;
  Dataset dataset;
  std::size_t resumed_from = 0;  // iterations found on disk at start
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Runs config.iterations iterations, persisting after each one into out_dir:
///   dataset.csv / dataset.json  the current dataset
///   ledger.jsonl                one IterationRecord per line
///   timings.jsonl               per-phase wall-clock seconds
///   config.json                 configuration snapshot
///   bo_trace_<i>.csv, coverage_<i>.svg  (when config.emit_plots)
/// Without `initial` the dataset is built from the configured sampler. When
/// out_dir already holds a run with the same configuration the run resumes
/// after its last completed iteration; a different configuration raises
/// ErrorCode::InvalidArgument. Stops early once the dataset holds `max_samples`.
RunLedger run(const RunConfig& config, const std::filesystem::path& out_dir, std::optional<Dataset> initial = {},
              const IterationCallback& on_iteration = {}, std::size_t max_samples = 0);

struct CurvePoint {
  std::size_t samples = 0;
  std::string method;  // fairgen | grid | lhs
  double score = 0.0;
};

struct SamplerComparison {
  std::vector<CurvePoint> points;
  RunLedger fairgen;
};

/// Coverage-vs-sample-count curves. Grid designs are prefixes of one seeded
/// shuffled full-factorial grid; FairGen starts from the first init_size of
/// them; LHS designs are prefixes of one Latin hypercube. All three share the
/// FairGen standardizer and coverage configuration and are scored at the
/// sample counts FairGen reaches (infeasible designs count as samples).
SamplerComparison compare_samplers(const RunConfig& config, std::size_t budget, const std::filesystem::path& work_dir,
                                   const IterationCallback& on_iteration = {});

std::string curves_csv(std::span<const CurvePoint> points);

struct EvaluationOptions {
  std::size_t n_test = 50;
  std::size_t shapes_per_test = 10;
  std::uint64_t seed = 0;
  mdn::MdnConfig mdn;
  CoverageConfig coverage;
};

struct MaeRow {
  std::string label;
  std::size_t samples = 0;
  double mae = 0.0;
};

struct PairError {
  std::size_t dataset = 0;
  std::size_t test = 0;
  Point2 target;
  Point2 achieved;
  double abs_p1 = 0.0;
  double abs_p2 = 0.0;
};

struct GenerativeEvaluation {
  std::vector<MaeRow> rows;
  std::vector<Point2> test_points;
  std::vector<PairError> errors;
};

/// Trains one MDN per dataset and measures how well generated shapes hit
/// test properties drawn uniformly from the covered region of the union of
/// all datasets. Every dataset is expressed in the first dataset's
/// standardization. ErrorCode::DegenerateData when the rejection sampler
/// accepts fewer than 0.1% of its draws.
GenerativeEvaluation evaluate_generative(const std::vector<std::pair<std::string, Dataset>>& datasets,
                                         const EvaluationOptions& options);

std::string mae_csv(const GenerativeEvaluation& eval);
std::string errors_csv(const GenerativeEvaluation& eval);

// SVG figures.
std::string curves_svg(std::span<const CurvePoint> points);
std::string error_scatter_svg(const GenerativeEvaluation& eval);
std::string iteration_svg(const IterationArtifacts& artifacts, const IterationRecord& record,
                          const CoverageConfig& coverage);

}  // namespace fairgen
