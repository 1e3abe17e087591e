#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"
#include "problem/dataset.hpp"
#include "problem/problem.hpp"

using namespace fairgen;

namespace {

// Reference formulas written out independently of the library.
double ref_p1(const std::vector<double>& x) { return std::exp(1.5 * x[0] * x[1]) - x[2] * x[2]; }
double ref_p2(const std::vector<double>& x) {
  return 2.0 * x[0] * x[0] + x[2] * x[3] + 0.3 * std::sin(2.0 * std::numbers::pi * x[1]);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fairgen_test_problem_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("synthetic evaluation at reference shapes") {
  auto a = evaluate_synthetic(std::vector<double>{0, 0, 0, 0});
  CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(0.0));

  auto b = evaluate_synthetic(std::vector<double>{1, 1, 1, 1});
  CHECK(b[0] == doctest::Approx(std::exp(1.5) - 1.0).epsilon(1e-14));
  CHECK(b[0] == doctest::Approx(3.481689).epsilon(1e-6));
  CHECK(b[1] == doctest::Approx(3.0).epsilon(1e-14));

  auto c = evaluate_synthetic(std::vector<double>{0.5, 0, 1, 0});
  CHECK(std::abs(c[0]) < 1e-15);
  CHECK(c[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("synthetic evaluation matches the reference formulas and is pure") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    const auto p = evaluate_synthetic(x);
    const auto q = evaluate_synthetic(x);
    CHECK(p == q);
    CHECK(p[0] == doctest::Approx(ref_p1(x)).epsilon(1e-13));
    CHECK(p[1] == doctest::Approx(ref_p2(x)).epsilon(1e-13));
  }
}

TEST_CASE("out-of-bounds shapes raise a domain error") {
  CHECK(code_of([] { evaluate_synthetic(std::vector<double>{1.1, 0, 0, 0}); }) == ErrorCode::Domain);
  CHECK(code_of([] { evaluate_synthetic(std::vector<double>{0, -0.01, 0, 0}); }) == ErrorCode::Domain);
  CHECK(code_of([] { evaluate_synthetic(std::vector<double>{0, 0, 0}); }) == ErrorCode::Domain);
}

TEST_CASE("feasibility examples") {
  CHECK(synthetic_feasible(std::vector<double>{0.5, 0.5, 0.5, 0.5}));
  CHECK_FALSE(synthetic_feasible(std::vector<double>{0.5, 0.9, 0.8, 0.5}));
  CHECK_FALSE(synthetic_feasible(std::vector<double>{1.1, 0, 0, 0}));
  CHECK(synthetic_feasible(std::vector<double>{0.0, 0.8, 0.8, 0.0}));
}

TEST_CASE("feasibility rejects about 8% of uniform shapes") {
  // P(x2 + x3 > 1.6) for independent uniforms = 0.5 * 0.4^2 = 0.08.
  Rng rng(2024);
  int rejected = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    if (!synthetic_feasible(x)) ++rejected;
  }
  const double frac = static_cast<double>(rejected) / n;
  CHECK(frac >= 0.065);
  CHECK(frac <= 0.095);
}

TEST_CASE("grid sampling") {
  const auto g2 = grid_sample(2);
  CHECK(g2.size() == 16);
  for (const auto& x : g2)
    for (double v : x) CHECK((v == 0.0 || v == 1.0));
  const auto g1 = grid_sample(1);
  REQUIRE(g1.size() == 1);
  CHECK(g1[0] == std::vector<double>{0.5, 0.5, 0.5, 0.5});
  const auto g6 = grid_sample(6);
  CHECK(g6.size() == 1296);
  std::vector<ShapeVector> sorted = g6;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  for (const auto& x : g6)
    for (double v : x) CHECK((v >= 0.0 && v <= 1.0));
  CHECK(grid_sample(3, 2).size() == 9);
  CHECK(grid_levels_nearest(1296, 4) == 6);
  CHECK(grid_levels_nearest(1000, 4) == 6);
  CHECK(grid_levels_covering(1297, 4) == 7);
}

TEST_CASE("shuffled grid is a permutation of the grid") {
  auto a = shuffled_grid(4, 9);
  auto b = grid_sample(4);
  CHECK(a != b);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(shuffled_grid(4, 9) == shuffled_grid(4, 9));
}

TEST_CASE("latin hypercube stratification and determinism") {
  for (std::size_t n : {1u, 4u, 17u, 200u}) {
    const auto s = lhs_sample(n, 5);
    REQUIRE(s.size() == n);
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<int> bins(n, 0);
      for (const auto& x : s) {
        REQUIRE(x[j] >= 0.0);
        REQUIRE(x[j] <= 1.0);
        auto b = static_cast<std::size_t>(x[j] * static_cast<double>(n));
        bins[std::min(b, n - 1)]++;
      }
      CHECK(std::all_of(bins.begin(), bins.end(), [](int c) { return c == 1; }));
    }
  }
  CHECK(lhs_sample(50, 3) == lhs_sample(50, 3));
  CHECK(lhs_sample(50, 3) != lhs_sample(50, 4));
}

TEST_CASE("standardizer fit, apply and invert") {
  const std::vector<PropertyVector> raw{{0.0, 5.0}, {2.0, 7.0}};
  const auto s = Standardizer::fit(raw);
  CHECK(s.mean()[0] == doctest::Approx(1.0));
  CHECK(s.stddev()[0] == doctest::Approx(1.0));
  CHECK(s.apply(std::vector<double>{2.0, 7.0})[0] == doctest::Approx(1.0));

  const std::vector<PropertyVector> flat{{5.0, 1.0}, {5.0, 2.0}};
  CHECK(code_of([&] { Standardizer::fit(flat); }) == ErrorCode::DegenerateData);

  Rng rng(3);
  std::vector<PropertyVector> fit_data;
  for (int i = 0; i < 100; ++i) fit_data.push_back({rng.uniform(-3, 5), rng.uniform(0, 100)});
  const auto t = Standardizer::fit(fit_data);
  double m0 = 0.0, v0 = 0.0;
  for (const auto& v : fit_data) m0 += t.apply(v)[0];
  m0 /= 100.0;
  for (const auto& v : fit_data) v0 += std::pow(t.apply(v)[0] - m0, 2);
  CHECK(std::abs(m0) < 1e-12);
  CHECK(v0 / 100.0 == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> v{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const auto back = t.invert(t.apply(v));
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(back[j] - v[j]) <= 1e-12 * std::max(1.0, std::abs(v[j])));
  }
}

TEST_CASE("initial datasets keep infeasible rows but exclude them from the active set") {
  const auto data = initialize_dataset(synthetic_problem(), "grid", 1296, 0);
  CHECK(data.size() == 1296);
  CHECK(data.feasible_count() < data.size());
  CHECK(data.feasible_count() > 0);
  for (const auto& r : data.records) {
    CHECK(r.provenance == "init-grid");
    const auto z = data.standardizer.apply(r.raw_properties);
    CHECK(z == r.std_properties);
    CHECK(r.feasible == synthetic_feasible(r.shape));
  }
  const auto lhs = initialize_dataset(synthetic_problem(), "lhs", 200, 7);
  CHECK(lhs.size() == 200);
  CHECK(code_of([] { initialize_dataset(synthetic_problem(), "sobol", 10, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("provenance tags") {
  CHECK(iteration_provenance(3) == "fairgen-iter-3");
  CHECK(provenance_iteration("fairgen-iter-12") == 12u);
  CHECK_FALSE(provenance_iteration("init-grid").has_value());
  CHECK_FALSE(provenance_iteration("fairgen-iter-").has_value());
}

TEST_CASE("dataset CSV round trip is exact") {
  const auto dir = temp_dir("roundtrip");
  auto data = initialize_dataset(synthetic_problem(), "lhs", 64, 21);
  data.append(synthetic_problem(), {0.1, 0.2, 0.3, 0.4}, iteration_provenance(1));
  const auto path = dir / "d.csv";
  save_dataset(data, path);
  CHECK(std::filesystem::exists(sidecar_path(path)));
  const auto back = load_dataset(path);
  CHECK(back.size() == data.size());
  CHECK(back.standardizer.mean() == data.standardizer.mean());
  CHECK(back.standardizer.stddev() == data.standardizer.stddev());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back.records[i].shape == data.records[i].shape);
    CHECK(back.records[i].raw_properties == data.records[i].raw_properties);
    CHECK(back.records[i].std_properties == data.records[i].std_properties);
    CHECK(back.records[i].provenance == data.records[i].provenance);
    CHECK(back.records[i].feasible == data.records[i].feasible);
  }
  CHECK(dataset_csv(back) == dataset_csv(data));
  const std::string header = read_file(path).substr(0, read_file(path).find('\n'));
  CHECK(header == "x1,x2,x3,x4,p1_raw,p2_raw,p1,p2,provenance,feasible");
}

TEST_CASE("malformed dataset files report the line") {
  const auto dir = temp_dir("malformed");
  auto data = initialize_dataset(synthetic_problem(), "lhs", 30, 1);
  const auto path = dir / "d.csv";
  save_dataset(data, path);
  std::string text = read_file(path);
  // Corrupt the third data row (line 4 of the file).
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) pos = text.find('\n', pos) + 1;
  text.replace(pos, 3, "abc");
  write_file_atomic(path, text);
  try {
    load_dataset(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find(":4:") != std::string::npos);
  }
  CHECK(code_of([&] { load_dataset(dir / "missing.csv"); }) == ErrorCode::Io);
}
