#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "common/error.hpp"
#include "common/text.hpp"
#include "pipeline/pipeline.hpp"

using namespace fairgen;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

RunConfig small_config() {
  RunConfig c;
  c.init_sampler = "lhs";
  c.init_size = 120;
  c.iterations = 3;
  c.seed = 21;
  c.emit_plots = false;
  c.mdn.hidden_layers = 2;
  c.mdn.hidden_width = 16;
  c.mdn.components = 3;
  c.mdn.epochs = 40;
  c.bo.iterations = 4;
  c.bo.candidates = 100;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fairgen_test_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::vector<std::string> out;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("iteration accounting and provenance") {
  const RunConfig cfg = small_config();
  Dataset data = initialize_dataset(synthetic_problem(), "lhs", cfg.init_size, cfg.seed);
  const std::size_t before = data.size();
  IterationArtifacts art;
  const auto rec = run_iteration(data, cfg, 1, iteration_seed(cfg.seed, 1), &art);
  CHECK(rec.generated == 45);
  CHECK(rec.generated == cfg.candidates_per_iteration());
  CHECK(rec.infeasible + rec.outliers + rec.appended == rec.generated);
  CHECK(data.size() == before + rec.appended);
  CHECK(rec.dataset_size == data.size());
  CHECK(rec.sc_after >= rec.sc_before);
  CHECK(rec.targets.size() == 3);
  CHECK(art.appended_points.size() == rec.appended);
  for (std::size_t i = before; i < data.size(); ++i) {
    CHECK(data.records[i].provenance == "fairgen-iter-1");
    CHECK(data.records[i].feasible);
    CHECK(cfg.coverage.box.contains({data.records[i].std_properties[0], data.records[i].std_properties[1]}));
  }
  for (std::size_t i = 0; i < before; ++i) CHECK(data.records[i].provenance == "init-lhs");
}

TEST_CASE("an iteration with every candidate infeasible still produces a record") {
  RunConfig cfg = small_config();
  Dataset data = initialize_dataset(synthetic_problem(), "lhs", cfg.init_size, cfg.seed);
  ProblemSpec never = synthetic_problem();
  never.feasible = [](std::span<const double>) { return false; };
  const std::size_t before = data.size();
  const auto rec = run_iteration(never, data, cfg, 1, 5);
  CHECK(rec.generated == 45);
  CHECK(rec.infeasible == 45);
  CHECK(rec.appended == 0);
  CHECK(rec.sc_after == rec.sc_before);
  CHECK(data.size() == before);
}

TEST_CASE("outliers are rejected against the coverage box") {
  RunConfig cfg = small_config();
  cfg.coverage.box = {-2.0, -2.0, 4.0, 4.0};
  Dataset data = initialize_dataset(synthetic_problem(), "lhs", cfg.init_size, cfg.seed);
  ProblemSpec far = synthetic_problem();
  far.evaluate = [](std::span<const double>) { return PropertyVector{1e6, 1e6}; };
  const auto rec = run_iteration(far, data, cfg, 2, 6);
  CHECK(rec.infeasible + rec.outliers == 45);
  CHECK(rec.outliers > 0);
  CHECK(rec.appended == 0);
}

TEST_CASE("records round-trip through JSON") {
  IterationRecord r;
  r.iteration = 4;
  r.seed = 99;
  r.sc_before = 0.1;
  r.sc_after = 0.2;
  r.targets = {{0.5, -1.0}, {1.0 / 3.0, 2.0}};
  r.su_targets = 0.7;
  r.objective = 0.13;
  r.generated = 45;
  r.infeasible = 5;
  r.outliers = 1;
  r.appended = 39;
  r.dataset_size = 300;
  const auto back = IterationRecord::from_json(nlohmann::json::parse(r.to_json().dump()));
  CHECK(back.to_json() == r.to_json());
  CHECK(back.targets[1].x == 1.0 / 3.0);
  CHECK(code_of([] { IterationRecord::from_json(nlohmann::json::object()); }) == ErrorCode::Parse);
}

TEST_CASE("runs are reproducible and resumable") {
  RunConfig cfg = small_config();
  const fs::path a = fresh_dir("a"), b = fresh_dir("b"), c = fresh_dir("c");
  const auto full = run(cfg, a);
  REQUIRE(full.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(full.records[i].iteration == i + 1);
    CHECK(full.records[i].seed == (cfg.seed ^ (i + 1)));
    if (i > 0) CHECK(full.records[i].sc_before == full.records[i - 1].sc_after);
  }
  CHECK(lines_of(a / "ledger.jsonl").size() == 3);
  CHECK(lines_of(a / "timings.jsonl").size() == 3);
  CHECK(fs::exists(a / "config.json"));

  SUBCASE("identical runs give identical bytes") {
    run(cfg, b);
    CHECK(read_file(a / "dataset.csv") == read_file(b / "dataset.csv"));
    CHECK(read_file(a / "ledger.jsonl") == read_file(b / "ledger.jsonl"));
  }
  SUBCASE("interrupted and resumed equals uninterrupted") {
    RunConfig part = cfg;
    part.iterations = 1;
    run(part, c);
    const auto resumed = run(cfg, c);
    CHECK(resumed.resumed_from == 1);
    CHECK(read_file(a / "dataset.csv") == read_file(c / "dataset.csv"));
    CHECK(read_file(a / "ledger.jsonl") == read_file(c / "ledger.jsonl"));
  }
  SUBCASE("dataset rows without a ledger line are discarded on resume") {
    RunConfig part = cfg;
    part.iterations = 2;
    run(part, c);
    auto ledger = lines_of(c / "ledger.jsonl");
    REQUIRE(ledger.size() == 2);
    write_file_atomic(c / "ledger.jsonl", ledger[0] + "\n" + ledger[1].substr(0, 10));
    const auto resumed = run(cfg, c);
    CHECK(resumed.resumed_from == 1);
    CHECK(read_file(a / "dataset.csv") == read_file(c / "dataset.csv"));
    CHECK(read_file(a / "ledger.jsonl") == read_file(c / "ledger.jsonl"));
  }
  SUBCASE("a different configuration is refused") {
    RunConfig other = cfg;
    other.bo.psi = 0.5;
    CHECK(code_of([&] { run(other, a); }) == ErrorCode::InvalidArgument);
  }
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("plots and traces are emitted on request") {
  RunConfig cfg = small_config();
  cfg.iterations = 1;
  cfg.emit_plots = true;
  const fs::path dir = fresh_dir("plots");
  run(cfg, dir);
  const std::string trace = read_file(dir / "bo_trace_1.csv");
  CHECK(trace.rfind("evaluation,phase,", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(trace.begin(), trace.end(), '\n')) ==
        1 + cfg.bo.init_batches + cfg.bo.iterations + cfg.bo.random_walks);
  const std::string svg = read_file(dir / "coverage_1.svg");
  CHECK(svg.find("<svg ") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("sampler comparison curves") {
  RunConfig cfg = small_config();
  cfg.init_size = 100;
  cfg.iterations = 5;
  const fs::path dir = fresh_dir("compare");
  const auto cmp = compare_samplers(cfg, 190, dir);
  REQUIRE(!cmp.points.empty());
  CHECK(cmp.points.size() % 3 == 0);
  std::map<std::string, std::vector<CurvePoint>> by;
  for (const auto& p : cmp.points) by[p.method].push_back(p);
  CHECK(by.size() == 3);
  for (const auto& [method, pts] : by) {
    CHECK(pts.front().samples == 100);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      CHECK(pts[i].samples >= pts[i - 1].samples);
      CHECK(pts[i].score >= pts[i - 1].score);
    }
  }
  // Same counts for every method, and FairGen starts where grid starts.
  for (std::size_t i = 0; i < by["grid"].size(); ++i) {
    CHECK(by["grid"][i].samples == by["fairgen"][i].samples);
    CHECK(by["lhs"][i].samples == by["fairgen"][i].samples);
  }
  CHECK(by["grid"].front().score == doctest::Approx(by["fairgen"].front().score).epsilon(1e-12));
  CHECK(cmp.fairgen.dataset.size() >= 190);
  CHECK(cmp.fairgen.dataset.size() < 190 + cfg.candidates_per_iteration());
  const std::string csv = curves_csv(cmp.points);
  CHECK(csv.rfind("sample_count,method,score\n", 0) == 0);
  CHECK(curves_svg(cmp.points).find("</svg>") != std::string::npos);
  CHECK(code_of([&] { compare_samplers(cfg, 50, dir); }) == ErrorCode::InvalidArgument);
  fs::remove_all(dir);
}

TEST_CASE("generative evaluation") {
  EvaluationOptions opt;
  opt.n_test = 8;
  opt.shapes_per_test = 4;
  opt.seed = 3;
  opt.mdn.hidden_layers = 2;
  opt.mdn.hidden_width = 12;
  opt.mdn.components = 3;
  opt.mdn.epochs = 40;
  const Dataset grid = initialize_dataset(synthetic_problem(), "grid", 81, 1);
  const Dataset lhs = initialize_dataset(synthetic_problem(), "lhs", 60, 2);
  const std::vector<std::pair<std::string, Dataset>> sets{{"grid", grid}, {"lhs", lhs}};
  const auto eval = evaluate_generative(sets, opt);
  REQUIRE(eval.rows.size() == 2);
  CHECK(eval.rows[0].label == "grid");
  CHECK(eval.rows[0].samples == grid.size());
  CHECK(eval.test_points.size() == 8);
  CHECK(eval.errors.size() == 2 * 8 * 4);
  for (const auto& r : eval.rows) CHECK((r.mae >= 0.0 && std::isfinite(r.mae)));
  double sum = 0.0;
  for (const auto& e : eval.errors)
    if (e.dataset == 1) sum += 0.5 * (e.abs_p1 + e.abs_p2);
  CHECK(eval.rows[1].mae == doctest::Approx(sum / 32.0).epsilon(1e-12));
  const auto again = evaluate_generative(sets, opt);
  CHECK(mae_csv(eval) == mae_csv(again));
  CHECK(errors_csv(eval) == errors_csv(again));
  CHECK(mae_csv(eval).rfind("label,samples,mae\n", 0) == 0);
  CHECK(error_scatter_svg(eval).find("</svg>") != std::string::npos);

  SUBCASE("a dataset of one repeated record") {
    Dataset single = grid;
    single.records.assign(20, grid.records[40]);
    const std::vector<std::pair<std::string, Dataset>> one{{"grid", grid}, {"single", single}};
    const auto e = evaluate_generative(one, opt);
    CHECK(std::isfinite(e.rows[1].mae));
  }
  SUBCASE("a vanishing covered region is reported") {
    EvaluationOptions tiny = opt;
    tiny.coverage.rho = 1e-4;
    CHECK(code_of([&] { evaluate_generative(sets, tiny); }) == ErrorCode::DegenerateData);
  }
  CHECK(code_of([&] { evaluate_generative({}, opt); }) == ErrorCode::InvalidArgument);
}
