#include "fairgen/fairgen.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <optional>
#include <string>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"
#include "coverage/coverage.hpp"
#include "coverage/svg.hpp"
#include "ensemble/ensemble.hpp"
#include "mdn/mdn.hpp"
#include "pipeline/config.hpp"
#include "pipeline/pipeline.hpp"
#include "problem/dataset.hpp"

struct fg_config {
  fairgen::RunConfig value;
};

struct fg_dataset {
  fairgen::Dataset value;
};

namespace {

thread_local std::string last_error;

fg_status to_status(fairgen::ErrorCode code) {
  switch (code) {
    case fairgen::ErrorCode::InvalidArgument: return FG_ERR_INVALID_ARGUMENT;
    case fairgen::ErrorCode::Domain: return FG_ERR_DOMAIN;
    case fairgen::ErrorCode::DegenerateData: return FG_ERR_DEGENERATE_DATA;
    case fairgen::ErrorCode::Unsupported: return FG_ERR_UNSUPPORTED;
    case fairgen::ErrorCode::Training: return FG_ERR_TRAINING;
    case fairgen::ErrorCode::Numeric: return FG_ERR_NUMERIC;
    case fairgen::ErrorCode::Io: return FG_ERR_IO;
    case fairgen::ErrorCode::Parse: return FG_ERR_PARSE;
  }
  return FG_ERR_INTERNAL;
}

// Runs fn, translating exceptions into a status and the thread-local message.
template <typename Fn>
fg_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return FG_OK;
  } catch (const fairgen::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return FG_ERR_INTERNAL;
}

void need(const void* ptr, const char* what) {
  fairgen::require(ptr != nullptr, fairgen::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

std::vector<fairgen::Point2> active_points(const fairgen::Dataset& data) { return fairgen::property_points(data); }

}  // namespace

extern "C" {

const char* fg_version(void) { return "0.1.0"; }

const char* fg_last_error(void) { return last_error.c_str(); }

const char* fg_status_name(fg_status status) {
  switch (status) {
    case FG_OK: return "ok";
    case FG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FG_ERR_DOMAIN: return "domain error";
    case FG_ERR_DEGENERATE_DATA: return "degenerate data";
    case FG_ERR_UNSUPPORTED: return "unsupported";
    case FG_ERR_TRAINING: return "training failure";
    case FG_ERR_NUMERIC: return "numeric failure";
    case FG_ERR_IO: return "i/o error";
    case FG_ERR_PARSE: return "parse error";
    case FG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

fg_status fg_config_create(fg_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new fg_config{};
  });
}

void fg_config_destroy(fg_config* config) { delete config; }

fg_status fg_config_load_toml(fg_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    fairgen::RunConfig copy = config->value;
    fairgen::apply_toml_file(copy, path);
    config->value = std::move(copy);
  });
}

fg_status fg_config_set(fg_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    fairgen::set_config_value(config->value, key, value);
  });
}

fg_status fg_config_get(const fg_config* config, const char* key, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    const std::string v = fairgen::get_config_value(config->value, key);
    if (needed != nullptr) *needed = v.size() + 1;
    if (buf != nullptr && cap > v.size()) std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

fg_status fg_config_validate(const fg_config* config) {
  return guarded([&] {
    need(config, "config");
    config->value.validate();
  });
}

fg_status fg_config_apply_environment(fg_config* config) {
  return guarded([&] {
    need(config, "config");
    if (const auto seed = fairgen::seed_from_environment()) config->value.seed = *seed;
  });
}

fg_status fg_dataset_init(const char* problem, const char* sampler, size_t n, uint64_t seed, fg_dataset** out) {
  return guarded([&] {
    need(problem, "problem");
    need(sampler, "sampler");
    need(out, "out");
    fairgen::require(n >= 1, fairgen::ErrorCode::InvalidArgument, "dataset size must be >= 1");
    auto data = fairgen::initialize_dataset(fairgen::problem_by_name(problem), sampler, n, seed);
    *out = new fg_dataset{std::move(data)};
  });
}

fg_status fg_dataset_load(const char* csv_path, fg_dataset** out) {
  return guarded([&] {
    need(csv_path, "path");
    need(out, "out");
    auto data = fairgen::load_dataset(csv_path);
    *out = new fg_dataset{std::move(data)};
  });
}

fg_status fg_dataset_save(const fg_dataset* data, const char* csv_path) {
  return guarded([&] {
    need(data, "dataset");
    need(csv_path, "path");
    fairgen::save_dataset(data->value, csv_path);
  });
}

void fg_dataset_destroy(fg_dataset* data) { delete data; }

size_t fg_dataset_size(const fg_dataset* data) { return data == nullptr ? 0 : data->value.size(); }

size_t fg_dataset_feasible_count(const fg_dataset* data) {
  return data == nullptr ? 0 : data->value.feasible_count();
}

fg_status fg_dataset_dims(const fg_dataset* data, size_t* d, size_t* p) {
  return guarded([&] {
    need(data, "dataset");
    if (d != nullptr) *d = data->value.d;
    if (p != nullptr) *p = data->value.p;
  });
}

fg_status fg_coverage(const fg_config* config, const fg_dataset* data, double* score, fg_coverage_method* method) {
  return guarded([&] {
    need(config, "config");
    need(data, "dataset");
    need(score, "score");
    const auto report = fairgen::coverage_report(active_points(data->value), config->value.coverage);
    *score = report.score;
    if (method != nullptr)
      *method = report.method == fairgen::CoverageMethod::Exact ? FG_COVERAGE_EXACT : FG_COVERAGE_RASTER;
  });
}

fg_status fg_coverage_svg(const fg_config* config, const fg_dataset* data, const char* svg_path) {
  return guarded([&] {
    need(config, "config");
    need(data, "dataset");
    need(svg_path, "path");
    const auto& cov = config->value.coverage;
    cov.validate();
    const auto points = active_points(data->value);
    const std::vector<fairgen::PointLayer> layers{{points, "#333333", "dot", 1.2, "designs"}};
    std::string svg;
    if (cov.k == 1)
      svg = fairgen::coverage_svg(fairgen::geom::build_voronoi(points, cov.box), cov.rho, layers);
    else
      svg = fairgen::raster_coverage_svg(points, cov, layers);
    fairgen::write_file_atomic(svg_path, svg);
  });
}

fg_status fg_run(const fg_config* config, const fg_dataset* initial, const char* out_dir,
                 fg_json_callback on_iteration, void* user) {
  return guarded([&] {
    need(config, "config");
    need(out_dir, "out_dir");
    std::optional<fairgen::Dataset> init;
    if (initial != nullptr) init = initial->value;
    fairgen::IterationCallback cb;
    if (on_iteration != nullptr)
      cb = [&](const fairgen::IterationRecord& r) { on_iteration(r.to_json().dump().c_str(), user); };
    fairgen::run(config->value, out_dir, std::move(init), cb);
  });
}

fg_status fg_uncertainty_heatmap(const fg_config* config, const fg_dataset* data, size_t resolution,
                                 const char* csv_path, const char* svg_path, double* min_value, double* max_value) {
  return guarded([&] {
    need(config, "config");
    need(data, "dataset");
    need(csv_path, "csv_path");
    fairgen::require(resolution >= 2, fairgen::ErrorCode::InvalidArgument, "heatmap resolution must be >= 2");
    const auto& cfg = config->value;
    cfg.validate();
    namespace ens = fairgen::ensemble;
    const auto X = fairgen::mdn::to_matrix(data->value.feasible_std_properties());
    const auto e = ens::train_ensemble(data->value, cfg.mdn, cfg.ensemble_size,
                                       fairgen::derive_seed(cfg.seed, "ensemble"), cfg.parallel);
    const auto corr = ens::match_components(e, X);
    const auto field = ens::heatmap(e, corr, cfg.coverage.box, resolution);
    fairgen::write_file_atomic(csv_path, ens::heatmap_csv(field));
    if (svg_path != nullptr) {
      const auto points = active_points(data->value);
      fairgen::write_file_atomic(svg_path, ens::heatmap_svg(field, points));
    }
    const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
    if (min_value != nullptr) *min_value = *lo;
    if (max_value != nullptr) *max_value = *hi;
  });
}

fg_status fg_compare(const fg_config* config, size_t budget, const char* out_dir, fg_json_callback on_point,
                     void* user) {
  return guarded([&] {
    need(config, "config");
    need(out_dir, "out_dir");
    const std::filesystem::path dir(out_dir);
    const auto cmp = fairgen::compare_samplers(config->value, budget, dir);
    fairgen::write_file_atomic(dir / "curves.csv", fairgen::curves_csv(cmp.points));
    fairgen::write_file_atomic(dir / "curves.svg", fairgen::curves_svg(cmp.points));
    if (on_point != nullptr)
      for (const auto& p : cmp.points) {
        const nlohmann::json j{{"sample_count", p.samples}, {"method", p.method}, {"score", p.score}};
        on_point(j.dump().c_str(), user);
      }
  });
}

fg_status fg_evaluate(const fg_config* config, const fg_dataset* const* datasets, const char* const* labels,
                      size_t count, size_t n_test, size_t shapes_per_test, uint64_t seed, const char* out_dir,
                      fg_json_callback on_row, void* user) {
  return guarded([&] {
    need(config, "config");
    need(datasets, "datasets");
    need(out_dir, "out_dir");
    fairgen::require(count >= 1, fairgen::ErrorCode::InvalidArgument, "at least one dataset is required");
    std::vector<std::pair<std::string, fairgen::Dataset>> items;
    for (size_t i = 0; i < count; ++i) {
      need(datasets[i], "dataset");
      std::string label = labels != nullptr && labels[i] != nullptr ? labels[i] : "dataset" + std::to_string(i + 1);
      items.emplace_back(std::move(label), datasets[i]->value);
    }
    fairgen::EvaluationOptions opts;
    opts.n_test = n_test;
    opts.shapes_per_test = shapes_per_test;
    opts.seed = seed;
    opts.mdn = config->value.mdn;
    opts.coverage = config->value.coverage;
    const auto eval = fairgen::evaluate_generative(items, opts);
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fairgen::fail(fairgen::ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    fairgen::write_file_atomic(dir / "mae.csv", fairgen::mae_csv(eval));
    fairgen::write_file_atomic(dir / "errors.csv", fairgen::errors_csv(eval));
    fairgen::write_file_atomic(dir / "errors.svg", fairgen::error_scatter_svg(eval));
    if (on_row != nullptr)
      for (const auto& r : eval.rows) {
        const nlohmann::json j{{"label", r.label}, {"samples", r.samples}, {"mae", r.mae}};
        on_row(j.dump().c_str(), user);
      }
  });
}

}  // extern "C"
