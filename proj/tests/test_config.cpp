#include "pimex/config.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace pimex;
using nlohmann::json;

TEST_CASE("normalized form round-trips for every problem") {
  for (auto p : {Problem::Piston, Problem::LinearModel, Problem::ScalarDecay}) {
    const json first = config_to_json(default_config(p));
    const json second = config_to_json(config_from_json(first));
    CHECK(first == second);
    CHECK(first.at("problem") == to_string(p));
  }
}

TEST_CASE("sparse input fills defaults and normalizes") {
  const json in = json::parse(R"({"problem": "piston", "scheme": "imex3", "dt": 0.005,
                                  "piston": {"n_cells": 40, "mu_k": 2.5}})");
  const RunConfig cfg = config_from_json(in);
  CHECK(cfg.scheme == "imex3");
  CHECK(cfg.dt == 0.005);
  CHECK(cfg.piston.n_cells == 40);
  CHECK(cfg.mu == std::vector<double>{2.5});
  CHECK(cfg.piston.mu_k == 2.5);
  CHECK(cfg.optimize.upper == std::vector<double>{10.0});
  const json norm = config_to_json(cfg);
  CHECK(config_to_json(config_from_json(norm)) == norm);
  CHECK(norm.at("piston").at("gamma") == 1.4);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"shceme": "imex1"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"piston": {"ncells": 10}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"optimize": {"bounds": [0, 1]}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"newton": {"tol": 1e-9}})")), ConfigError);
  try {
    config_from_json(json::parse(R"({"order_study": {"scheme": ["imex1"]}})"));
    FAIL("no exception");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'scheme'") != std::string::npos);
  }
}

TEST_CASE("ill-typed and invalid values are rejected") {
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"dt": "small"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"dt": -0.1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"T": -1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"problem": "foil"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"mu": [1, 2]})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"trajectory": "disk"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"qoi": "energy"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"optimize": {"lower": [5], "upper": [1]}})")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"mu": [3], "piston": {"mu_k": 2}})")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"scheme": "imex7"})")), UnknownSchemeError);
  CHECK_THROWS_AS(config_from_json(json::parse("[1, 2]")), ConfigError);
}

TEST_CASE("configuration files") {
  const auto dir = std::filesystem::temp_directory_path() / "pimex-test-config";
  std::filesystem::create_directories(dir);
  const auto good = dir / "decay.json";
  std::ofstream(good) << R"({"problem": "scalar-decay", "mu": [0.5], "scalar_decay": {"u0": 2}})";
  const auto cfg = load_config(good);
  CHECK(cfg.problem == Problem::ScalarDecay);
  CHECK(cfg.decay_u0 == 2.0);
  CHECK(cfg.scheme == "imex4");

  const auto bad = dir / "broken.json";
  std::ofstream(bad) << "{\"dt\": ";
  CHECK_THROWS_AS(load_config(bad), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("problem instances follow the configuration") {
  RunConfig cfg = default_config(Problem::Piston);
  cfg.piston.n_cells = 10;
  const auto prob = make_problem(cfg, Vector::Constant(1, 4.0));
  CHECK(prob.system.size() == 3);
  CHECK(prob.system.mu()(0) == 4.0);
  CHECK(prob.system[2].state_dim() == 30);

  cfg = default_config(Problem::LinearModel);
  cfg.qoi = "component:1:0";
  CHECK(make_problem(cfg).system.size() == 2);
  cfg.qoi = "component:2:0";
  CHECK_THROWS_AS(make_problem(cfg), ConfigError);

  const auto box = make_bounds(default_config(Problem::Piston));
  CHECK(box.lower(0) == 0.0);
  CHECK(box.upper(0) == 10.0);
  CHECK(std::isinf(make_bounds(default_config(Problem::ScalarDecay)).upper(0)));
}
