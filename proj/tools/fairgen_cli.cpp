// fairgen command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairgen/fairgen.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct ConfigDeleter {
  void operator()(fg_config* c) const { fg_config_destroy(c); }
};
struct DatasetDeleter {
  void operator()(fg_dataset* d) const { fg_dataset_destroy(d); }
};
using ConfigPtr = std::unique_ptr<fg_config, ConfigDeleter>;
using DatasetPtr = std::unique_ptr<fg_dataset, DatasetDeleter>;

// Thrown to unwind a subcommand with a prepared exit code.
struct Exit {
  int code;
};

void check(fg_status status, int code = kExitRuntime) {
  if (status == FG_OK) return;
  std::fprintf(stderr, "fairgen: %s: %s\n", fg_status_name(status), fg_last_error());
  throw Exit{status == FG_ERR_INVALID_ARGUMENT ? kExitUsage : code};
}

// Options shared by the subcommands that build a run configuration.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app, bool with_seed = true) {
    app->add_option("--config", config_path, "TOML run configuration")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "Override a configuration key (section.key=value), repeatable");
    if (with_seed) app->add_option("--seed", seed, "Master seed (overrides FAIRGEN_SEED and the config file)");
  }

  // defaults < FAIRGEN_SEED < config file < flags
  ConfigPtr build() const {
    fg_config* raw = nullptr;
    check(fg_config_create(&raw));
    ConfigPtr cfg(raw);
    check(fg_config_apply_environment(cfg.get()));
    // A malformed configuration file is a usage error, like a malformed flag.
    if (!config_path.empty()) {
      const fg_status st = fg_config_load_toml(cfg.get(), config_path.c_str());
      check(st, st == FG_ERR_PARSE ? kExitUsage : kExitRuntime);
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "fairgen: --set expects key=value, got '%s'\n", kv.c_str());
        throw Exit{kExitUsage};
      }
      check(fg_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (seed) set(cfg.get(), "run.seed", std::to_string(*seed));
    return cfg;
  }

  static void set(fg_config* cfg, const char* key, const std::string& value) {
    check(fg_config_set(cfg, key, value.c_str()));
  }
};

DatasetPtr load(const std::string& path) {
  fg_dataset* raw = nullptr;
  check(fg_dataset_load(path.c_str(), &raw));
  return DatasetPtr(raw);
}

std::string config_value(const fg_config* cfg, const char* key) {
  std::size_t needed = 0;
  check(fg_config_get(cfg, key, nullptr, 0, &needed));
  std::string buf(needed, '\0');
  check(fg_config_get(cfg, key, buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

void print_line(const char* json, void*) { std::printf("%s\n", json); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairgen: coverage-driven adaptive design generation"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", std::string(fg_version()));

  // init
  auto* init = app.add_subcommand("init", "Build an initial dataset");
  std::string problem = "synthetic", sampler = "grid", init_out;
  std::size_t init_n = 0;
  std::optional<std::uint64_t> init_seed;
  init->add_option("--problem", problem, "Problem name")->capture_default_str();
  init->add_option("--sampler", sampler, "grid or lhs")->check(CLI::IsMember({"grid", "lhs"}))->capture_default_str();
  init->add_option("--n", init_n, "Requested design count")->required()->check(CLI::PositiveNumber);
  init->add_option("--seed", init_seed, "Sampler seed (default FAIRGEN_SEED or 0)");
  init->add_option("--out", init_out, "Output CSV path")->required();

  // run
  auto* run = app.add_subcommand("run", "Run FairGen iterations");
  ConfigFlags run_flags;
  run_flags.add(run);
  std::string run_data, run_out = "fairgen-run";
  std::optional<std::size_t> run_iters;
  run->add_option("--data", run_data, "Initial dataset CSV (default: configured sampler)");
  run->add_option("--iters", run_iters, "Number of FairGen iterations");
  run->add_option("--out-dir", run_out, "Output directory")->capture_default_str();

  // coverage
  auto* cov = app.add_subcommand("coverage", "Report the coverage score of a dataset");
  ConfigFlags cov_flags;
  cov_flags.add(cov, false);
  std::string cov_data, cov_svg;
  std::optional<double> cov_rho;
  std::optional<unsigned> cov_k;
  cov->add_option("--data", cov_data, "Dataset CSV")->required();
  cov->add_option("--rho", cov_rho, "Vicinity radius");
  cov->add_option("--k", cov_k, "Neighbour threshold");
  cov->add_option("--svg", cov_svg, "Write the covered region as SVG");

  // uncertainty
  auto* unc = app.add_subcommand("uncertainty", "Train the ensemble and export the S_U heatmap");
  ConfigFlags unc_flags;
  unc_flags.add(unc);
  std::string unc_data, unc_csv = "uncertainty.csv", unc_svg;
  std::size_t unc_res = 50;
  unc->add_option("--data", unc_data, "Dataset CSV")->required();
  unc->add_option("--csv", unc_csv, "Heatmap CSV path")->capture_default_str();
  unc->add_option("--svg", unc_svg, "Heatmap SVG path");
  unc->add_option("--resolution", unc_res, "Lattice points per axis (>= 2)")->capture_default_str();

  // compare
  auto* cmp = app.add_subcommand("compare", "Coverage curves of FairGen, grid and LHS sampling");
  ConfigFlags cmp_flags;
  cmp_flags.add(cmp);
  std::size_t cmp_budget = 0;
  std::string cmp_out = "fairgen-compare";
  std::optional<std::size_t> cmp_iters;
  cmp->add_option("--budget", cmp_budget, "Total sample budget")->required();
  cmp->add_option("--iters", cmp_iters, "Maximum FairGen iterations");
  cmp->add_option("--out-dir", cmp_out, "Output directory")->capture_default_str();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Generative MAE of MDNs trained on each dataset");
  ConfigFlags ev_flags;
  ev_flags.add(ev, false);
  std::vector<std::string> ev_data, ev_labels;
  std::size_t ev_n_test = 50, ev_shapes = 10;
  std::uint64_t ev_seed = 0;
  std::string ev_out = "fairgen-evaluate";
  ev->add_option("--data", ev_data, "Dataset CSV, repeatable")->required();
  ev->add_option("--label", ev_labels, "Row label per dataset, repeatable (default: file stem)");
  ev->add_option("--n-test", ev_n_test, "Test properties")->capture_default_str();
  ev->add_option("--shapes", ev_shapes, "Shapes generated per test property")->capture_default_str();
  ev->add_option("--seed", ev_seed, "Evaluation seed")->capture_default_str();
  ev->add_option("--out-dir", ev_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*init) {
      std::uint64_t seed = std::stoull(config_value(ConfigFlags{}.build().get(), "run.seed"));
      if (init_seed) seed = *init_seed;
      fg_dataset* raw = nullptr;
      check(fg_dataset_init(problem.c_str(), sampler.c_str(), init_n, seed, &raw));
      DatasetPtr data(raw);
      check(fg_dataset_save(data.get(), init_out.c_str()));
      fg_config* craw = nullptr;
      check(fg_config_create(&craw));
      ConfigPtr defaults(craw);
      double score = 0.0;
      check(fg_coverage(defaults.get(), data.get(), &score, nullptr));
      std::printf("n=%zu feasible=%zu S_C=%.7g\n", fg_dataset_size(data.get()), fg_dataset_feasible_count(data.get()),
                  score);
    } else if (*run) {
      ConfigPtr cfg = run_flags.build();
      if (run_iters) ConfigFlags::set(cfg.get(), "run.iterations", std::to_string(*run_iters));
      check(fg_config_validate(cfg.get()));
      DatasetPtr data;
      if (!run_data.empty()) data = load(run_data);
      check(fg_run(cfg.get(), data.get(), run_out.c_str(), print_line, nullptr));
      std::printf("ledger: %s\n", (std::filesystem::path(run_out) / "ledger.jsonl").string().c_str());
    } else if (*cov) {
      ConfigPtr cfg = cov_flags.build();
      if (cov_rho) ConfigFlags::set(cfg.get(), "coverage.rho", std::to_string(*cov_rho));
      if (cov_k) ConfigFlags::set(cfg.get(), "coverage.k", std::to_string(*cov_k));
      check(fg_config_validate(cfg.get()));
      DatasetPtr data = load(cov_data);
      double score = 0.0;
      fg_coverage_method method = FG_COVERAGE_EXACT;
      check(fg_coverage(cfg.get(), data.get(), &score, &method));
      std::printf("S_C=%.7g method=%s n=%zu\n", score, method == FG_COVERAGE_EXACT ? "exact" : "raster",
                  fg_dataset_feasible_count(data.get()));
      if (!cov_svg.empty()) check(fg_coverage_svg(cfg.get(), data.get(), cov_svg.c_str()));
    } else if (*unc) {
      ConfigPtr cfg = unc_flags.build();
      check(fg_config_validate(cfg.get()));
      DatasetPtr data = load(unc_data);
      double lo = 0.0, hi = 0.0;
      check(fg_uncertainty_heatmap(cfg.get(), data.get(), unc_res, unc_csv.c_str(),
                                   unc_svg.empty() ? nullptr : unc_svg.c_str(), &lo, &hi));
      std::printf("S_U min=%.7g max=%.7g resolution=%zu\n", lo, hi, unc_res);
    } else if (*cmp) {
      ConfigPtr cfg = cmp_flags.build();
      if (cmp_iters) ConfigFlags::set(cfg.get(), "run.iterations", std::to_string(*cmp_iters));
      check(fg_config_validate(cfg.get()));
      check(fg_compare(cfg.get(), cmp_budget, cmp_out.c_str(), print_line, nullptr));
    } else if (*ev) {
      ConfigPtr cfg = ev_flags.build();
      check(fg_config_validate(cfg.get()));
      if (!ev_labels.empty() && ev_labels.size() != ev_data.size()) {
        std::fprintf(stderr, "fairgen: --label must be given once per --data\n");
        return kExitUsage;
      }
      std::vector<DatasetPtr> owned;
      std::vector<const fg_dataset*> handles;
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < ev_data.size(); ++i) {
        owned.push_back(load(ev_data[i]));
        handles.push_back(owned.back().get());
        labels.push_back(ev_labels.empty() ? std::filesystem::path(ev_data[i]).stem().string() : ev_labels[i]);
      }
      std::vector<const char*> label_ptrs;
      for (const auto& l : labels) label_ptrs.push_back(l.c_str());
      check(fg_evaluate(cfg.get(), handles.data(), label_ptrs.data(), handles.size(), ev_n_test, ev_shapes, ev_seed,
                        ev_out.c_str(), print_line, nullptr));
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitOk;
}
