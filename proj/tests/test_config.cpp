#include <doctest.h>

#include "metais/config.hpp"

using namespace metais;

namespace {

const char* kMinimal = R"({
  "problem": {"kind": "rackwitz"},
  "marginals": [{"kind": "lognormal", "mean": 1, "std": 0.2, "repeat": 3}],
  "seed": 4
})";

}  // namespace

TEST_CASE("defaults and repeat") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.marginals.size() == 3);
  CHECK(c.marginals[2] == Marginal::lognormal(1, 0.2));
  CHECK(c.method == Method::metais);
  CHECK(c.target_cov == 0.02);
  CHECK(c.seed == 4);
  CHECK(c.mcmc.thinning == 10);
  CHECK(c.mcmc.burn_in == 100);
  CHECK(c.refinement.m_min == 30);
  CHECK(c.refinement.m_max == 1000);
  CHECK(c.refinement.population_size == 10000);
  CHECK(!c.parallel_phases);
}

TEST_CASE("round trip is the identity") {
  RunConfig c = parse_config(kMinimal);
  c.method = Method::is;
  c.instrumental = {Marginal::normal(1.3, 0.3), Marginal::uniform(0.1, 3.0), Marginal::lognormal(2.0, 0.7)};
  c.target_cov = 0.1 / 3.0;
  c.refinement.initial_doe_size = 7;
  c.refinement.loo_low = 0.4;
  c.problem = ProblemConfig{};
  c.problem.kind = "external";
  c.problem.command = "python3 -c 'print(1)'";
  c.output = "out \"quoted\".json";
  const RunConfig back = parse_config(dump_json(config_to_json(c)));
  CHECK(back == c);
  const RunConfig again = parse_config(dump_json(config_to_json(back), -1));
  CHECK(again == c);
}

TEST_CASE("syntax errors carry the line") {
  try {
    (void)parse_config("{\n  \"seed\": 1,\n  \"problem\": {\"kind\": \"linear\"},,\n}");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("field errors carry the path and line") {
  const std::string text = "{\n \"problem\": {\"kind\": \"linear\"},\n \"marginals\": [\n  {\"kind\": \"normal\", \"mean\": 0, \"sd\": 1}\n ],\n \"seed\": 1\n}";
  try {
    (void)parse_config(text);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "marginals[0].std");
  }
  try {
    (void)parse_config(R"({"problem": {"kind": "linear"}, "marginals": [{"kind": "normal", "mean": 0, "std": 1}], "seed": 1, "target_cov": "x"})");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "target_cov");
    CHECK(e.line() == 1);
  }
}

TEST_CASE("invalid configurations") {
  auto with = [](const std::string& extra) {
    return std::string(R"({"problem": {"kind": "linear"}, "marginals": [{"kind": "normal", "mean": 0, "std": 1}])") + extra + "}";
  };
  CHECK_THROWS_AS(parse_config(with("")), ConfigError);  // no seed
  CHECK_THROWS_AS(parse_config(with(R"(, "seed": 1, "target_cov": 1.5)")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(R"(, "seed": 1, "method": "form")")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(R"(, "seed": 1, "bogus": 3)")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(R"(, "seed": 1, "method": "is")")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(R"(, "seed": -1)")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(R"(, "seed": 1, "mcmc": {"thinning": 0})")), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"kind": "parabola"}, "marginals": [{"kind": "normal", "mean": 0, "std": 1}], "seed": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"kind": "linear"}, "marginals": [{"kind": "normal", "mean": 0, "std": -1}], "seed": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("json writer") {
  nlohmann::json j = {{"a", 0.1}, {"b", std::numeric_limits<double>::infinity()}, {"c", 3}, {"d", 2.0}};
  const std::string s = dump_json(j, -1);
  CHECK(s == R"({"a":0.10000000000000001,"b":null,"c":3,"d":2.0})");
}
