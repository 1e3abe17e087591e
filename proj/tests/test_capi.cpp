#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "fairgen/fairgen.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  fg_config* ptr = nullptr;
  Config() { REQUIRE(fg_config_create(&ptr) == FG_OK); }
  ~Config() { fg_config_destroy(ptr); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;
  void set(const char* key, const char* value) { REQUIRE(fg_config_set(ptr, key, value) == FG_OK); }
};

struct Data {
  fg_dataset* ptr = nullptr;
  Data() = default;
  ~Data() { fg_dataset_destroy(ptr); }
  Data(const Data&) = delete;
  Data& operator=(const Data&) = delete;
};

std::string get(const fg_config* cfg, const char* key) {
  size_t needed = 0;
  REQUIRE(fg_config_get(cfg, key, nullptr, 0, &needed) == FG_OK);
  std::string buf(needed, '\0');
  REQUIRE(fg_config_get(cfg, key, buf.data(), buf.size(), &needed) == FG_OK);
  buf.resize(needed - 1);
  return buf;
}

void count_calls(const char* json, void* user) {
  CHECK(json[0] == '{');
  ++*static_cast<int*>(user);
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::strlen(fg_version()) > 0);
  CHECK(std::string(fg_status_name(FG_OK)) == "ok");
  CHECK(std::string(fg_status_name(FG_ERR_PARSE)) == "parse error");
}

TEST_CASE("configuration get and set") {
  Config cfg;
  CHECK(get(cfg.ptr, "run.iterations") == "20");
  CHECK(get(cfg.ptr, "coverage.rho") == "0.08");
  cfg.set("bo.psi", "0.25");
  CHECK(get(cfg.ptr, "bo.psi") == "0.25");
  char small[2];
  size_t needed = 0;
  CHECK(fg_config_get(cfg.ptr, "run.problem", small, sizeof small, &needed) == FG_OK);
  CHECK(needed == std::strlen("synthetic") + 1);
  CHECK(fg_config_set(cfg.ptr, "run.nothing", "1") == FG_ERR_INVALID_ARGUMENT);
  CHECK(std::string(fg_last_error()).find("run.nothing") != std::string::npos);
  CHECK(fg_config_set(cfg.ptr, "run.iterations", "many") == FG_ERR_INVALID_ARGUMENT);
  cfg.set("coverage.k", "0");
  CHECK(fg_config_validate(cfg.ptr) == FG_ERR_INVALID_ARGUMENT);
  CHECK(fg_config_create(nullptr) == FG_ERR_INVALID_ARGUMENT);
  CHECK(fg_config_load_toml(cfg.ptr, "/nonexistent/fairgen.toml") == FG_ERR_IO);
}

TEST_CASE("datasets through the C interface") {
  Data grid;
  REQUIRE(fg_dataset_init("synthetic", "grid", 81, 3, &grid.ptr) == FG_OK);
  CHECK(fg_dataset_size(grid.ptr) == 81);
  CHECK(fg_dataset_feasible_count(grid.ptr) <= 81);
  size_t d = 0, p = 0;
  CHECK(fg_dataset_dims(grid.ptr, &d, &p) == FG_OK);
  CHECK(d == 4);
  CHECK(p == 2);
  const fs::path path = fs::temp_directory_path() / "fairgen_test_capi.csv";
  CHECK(fg_dataset_save(grid.ptr, path.c_str()) == FG_OK);
  Data back;
  REQUIRE(fg_dataset_load(path.c_str(), &back.ptr) == FG_OK);
  CHECK(fg_dataset_size(back.ptr) == 81);
  Data bad;
  CHECK(fg_dataset_init("nope", "grid", 10, 1, &bad.ptr) == FG_ERR_INVALID_ARGUMENT);
  CHECK(fg_dataset_init("synthetic", "sobol", 10, 1, &bad.ptr) == FG_ERR_INVALID_ARGUMENT);
  CHECK(fg_dataset_load("/nonexistent/data.csv", &bad.ptr) == FG_ERR_IO);
  fs::remove(path);
  fs::remove(fs::path(path).replace_extension(".json"));
}

TEST_CASE("coverage of a single design is one disk") {
  Config cfg;
  Data grid;
  REQUIRE(fg_dataset_init("synthetic", "grid", 81, 0, &grid.ptr) == FG_OK);
  CHECK(fg_dataset_init("synthetic", "grid", 1, 0, &grid.ptr) == FG_ERR_DEGENERATE_DATA);
  // Keep the header and the centre design (row 41 of the 3^4 grid).
  const fs::path dir = fs::temp_directory_path();
  const fs::path full = dir / "fairgen_test_capi_full.csv", single = dir / "fairgen_test_capi_single.csv";
  REQUIRE(fg_dataset_save(grid.ptr, full.c_str()) == FG_OK);
  {
    std::ifstream in(full);
    std::ofstream out(single);
    std::string line;
    for (int i = 0; std::getline(in, line); ++i)
      if (i == 0 || i == 41) out << line << '\n';
  }
  fs::copy_file(fs::path(full).replace_extension(".json"), fs::path(single).replace_extension(".json"),
                fs::copy_options::overwrite_existing);
  Data one;
  REQUIRE(fg_dataset_load(single.c_str(), &one.ptr) == FG_OK);
  REQUIRE(fg_dataset_size(one.ptr) == 1);
  double score = 0.0;
  fg_coverage_method method = FG_COVERAGE_RASTER;
  REQUIRE(fg_coverage(cfg.ptr, one.ptr, &score, &method) == FG_OK);
  CHECK(method == FG_COVERAGE_EXACT);
  CHECK(score == doctest::Approx(std::numbers::pi * 0.08 * 0.08).epsilon(1e-12));
  cfg.set("coverage.k", "2");
  REQUIRE(fg_coverage(cfg.ptr, one.ptr, &score, &method) == FG_OK);
  CHECK(method == FG_COVERAGE_RASTER);
  CHECK(score == 0.0);
  for (const auto& p : {full, single}) {
    fs::remove(p);
    fs::remove(fs::path(p).replace_extension(".json"));
  }
}

TEST_CASE("a short run reports each iteration") {
  Config cfg;
  cfg.set("run.init_sampler", "lhs");
  cfg.set("run.init_size", "100");
  cfg.set("run.iterations", "2");
  cfg.set("run.emit_plots", "false");
  cfg.set("mdn.hidden_layers", "2");
  cfg.set("mdn.hidden_width", "12");
  cfg.set("mdn.components", "3");
  cfg.set("mdn.epochs", "30");
  cfg.set("bo.iterations", "3");
  cfg.set("bo.candidates", "50");
  const fs::path dir = fs::temp_directory_path() / "fairgen_test_capi_run";
  fs::remove_all(dir);
  int calls = 0;
  CHECK(fg_run(cfg.ptr, nullptr, dir.c_str(), count_calls, &calls) == FG_OK);
  CHECK(calls == 2);
  CHECK(fs::exists(dir / "ledger.jsonl"));
  Data data;
  REQUIRE(fg_dataset_load((dir / "dataset.csv").c_str(), &data.ptr) == FG_OK);
  CHECK(fg_dataset_size(data.ptr) >= 100);

  const fs::path csv = dir / "su.csv";
  double lo = -1.0, hi = -1.0;
  CHECK(fg_uncertainty_heatmap(cfg.ptr, data.ptr, 5, csv.c_str(), nullptr, &lo, &hi) == FG_OK);
  CHECK(lo >= 0.0);
  CHECK(hi >= lo);
  CHECK(fg_uncertainty_heatmap(cfg.ptr, data.ptr, 1, csv.c_str(), nullptr, nullptr, nullptr) ==
        FG_ERR_INVALID_ARGUMENT);
  fs::remove_all(dir);
}
