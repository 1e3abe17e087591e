#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bayesopt/bayesopt.hpp"
#include "coverage/coverage.hpp"
#include "mdn/mdn.hpp"

namespace fairgen {

struct RunConfig {
  std::string problem = "synthetic";
  std::string init_sampler = "grid";
  std::size_t init_size = 1000;
  std::size_t iterations = 20;
  std::size_t ensemble_size = 5;
  std::size_t samples_per_target_per_model = 3;
  std::uint64_t seed = 0;
  bool emit_plots = true;
  bool parallel = true;  // train ensemble members on separate threads
  mdn::MdnConfig mdn;
  bo::BoConfig bo;
  CoverageConfig coverage;

  /// ErrorCode::InvalidArgument on the first violated invariant.
  void validate() const;
  /// Candidates generated per iteration before filtering.
  std::size_t candidates_per_iteration() const {
    return bo.n_targets * samples_per_target_per_model * ensemble_size;
  }
};

/// Keys are "section.name", e.g. "run.iterations", "mdn.epochs", "bo.psi",
/// "coverage.rho", "coverage.box" (xmin,ymin,xmax,ymax).
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& config, std::string_view key);
std::vector<std::string> config_keys();

/// Applies a TOML document: [run], [mdn], [bo], [coverage] tables of scalar
/// keys, plus the coverage box as a four-element array. Unknown keys and
/// unsupported syntax raise ErrorCode::Parse with a line number.
void apply_toml(RunConfig& config, std::string_view text, std::string_view source = "<config>");
void apply_toml_file(RunConfig& config, const std::filesystem::path& path);

/// FAIRGEN_SEED, if set. ErrorCode::InvalidArgument if it is not an integer.
std::optional<std::uint64_t> seed_from_environment();

nlohmann::json config_to_json(const RunConfig& config);

}  // namespace fairgen
