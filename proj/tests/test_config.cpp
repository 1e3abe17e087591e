#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "common/error.hpp"
#include "pipeline/config.hpp"

using namespace fairgen;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("defaults follow the reference settings") {
  const RunConfig c;
  CHECK(c.ensemble_size == 5);
  CHECK(c.samples_per_target_per_model == 3);
  CHECK(c.candidates_per_iteration() == 45);
  CHECK(c.mdn.hidden_layers == 6);
  CHECK(c.mdn.hidden_width == 64);
  CHECK(c.mdn.components == 10);
  CHECK(c.bo.n_targets == 3);
  CHECK(c.bo.iterations == 50);
  CHECK(c.bo.random_walks == 10);
  CHECK(c.bo.init_batches == 10);
  CHECK(c.bo.psi == 0.1);
  CHECK(c.coverage.rho == 0.08);
  CHECK(c.coverage.k == 1);
  CHECK(c.init_size == 1000);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("TOML documents set every section") {
  RunConfig c;
  apply_toml(c, R"(# comment
[run]
problem = "synthetic"   # trailing comment
init_sampler = "lhs"
init_size = 200
iterations = 7
seed = 42

[mdn]
epochs = 500
learning_rate = 2e-3

[bo]
psi = 0.5
n_targets = 2

[coverage]
rho = 0.1
k = 2
box = [-1, -1, 3, 3.5]
)");
  CHECK(c.init_sampler == "lhs");
  CHECK(c.init_size == 200);
  CHECK(c.iterations == 7);
  CHECK(c.seed == 42);
  CHECK(c.mdn.epochs == 500);
  CHECK(c.mdn.learning_rate == 2e-3);
  CHECK(c.bo.psi == 0.5);
  CHECK(c.bo.n_targets == 2);
  CHECK(c.coverage.rho == 0.1);
  CHECK(c.coverage.k == 2);
  CHECK(c.coverage.box.xmin == -1.0);
  CHECK(c.coverage.box.ymax == 3.5);
  CHECK(get_config_value(c, "coverage.box") == "-1,-1,3,3.5");
}

TEST_CASE("TOML errors carry the line number") {
  RunConfig c;
  auto message = [&](const char* text) {
    try {
      apply_toml(c, text, "cfg.toml");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[run]\nbogus = 1\n").find("cfg.toml:2:") == 0);
  CHECK(message("[nope]\n").find("cfg.toml:1:") == 0);
  CHECK(message("[run]\niterations = ten\n").find("cfg.toml:2:") == 0);
  CHECK(message("iterations = 3\n").find("cfg.toml:1:") == 0);
  CHECK(message("[run]\niterations\n").find("cfg.toml:2:") == 0);
}

TEST_CASE("keyed access round trips") {
  RunConfig c;
  for (const auto& key : config_keys()) {
    const std::string v = get_config_value(c, key);
    RunConfig d;
    set_config_value(d, key, v);
    CHECK(get_config_value(d, key) == v);
  }
  CHECK(code_of([&] { set_config_value(c, "run.nothing", "1"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { set_config_value(c, "run.iterations", "-3"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { set_config_value(c, "bo.psi", "nan"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("validation rejects broken invariants") {
  RunConfig c;
  c.iterations = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
  c = {};
  c.bo.psi = -1.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
  c = {};
  c.init_sampler = "sobol";
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
  c = {};
  c.problem = "unknown";
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
  c = {};
  c.coverage.rho = 0.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("seed from the environment") {
  ::unsetenv("FAIRGEN_SEED");
  CHECK_FALSE(seed_from_environment().has_value());
  ::setenv("FAIRGEN_SEED", "1234", 1);
  CHECK(seed_from_environment() == 1234u);
  ::setenv("FAIRGEN_SEED", "12x", 1);
  CHECK(code_of([] { seed_from_environment(); }) == ErrorCode::InvalidArgument);
  ::unsetenv("FAIRGEN_SEED");
}

TEST_CASE("JSON snapshot lists every key") {
  const auto j = config_to_json(RunConfig{});
  CHECK(j.size() == config_keys().size());
  CHECK(j.at("run.iterations") == "20");
}
