#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "finsq/app/suites.hpp"

using namespace finsq;
using namespace finsq::app;

namespace {

RunConfig config_of(const std::string& text) { return parse_config_text(text, FINSQ_TEST_DATA); }

std::string config_error(const std::string& text) {
  try {
    config_of(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("schema validator keywords") {
  const auto s = Schema::parse(R"({
    "type": "object",
    "properties": {
      "n": {"type": "integer", "minimum": 1, "exclusiveMaximum": 5},
      "v": {"type": "array", "items": {"type": "number"}, "minItems": 2, "uniqueItems": true},
      "k": {"enum": ["a", "b"]},
      "r": {"$ref": "#/definitions/pos"},
      "o": {"oneOf": [{"type": "string"}, {"type": "object", "required": ["z"]}]}
    },
    "required": ["n"],
    "additionalProperties": false,
    "definitions": {"pos": {"type": "number", "exclusiveMinimum": 0}}
  })");
  CHECK(s.validate(Json::parse(R"({"n": 2, "v": [1, 2], "k": "a", "r": 0.5, "o": "x"})")).empty());
  CHECK(s.validate(Json::parse(R"({"n": 2, "o": {"z": 1}})")).empty());

  auto first = [&](const char* text) {
    const auto issues = s.validate(Json::parse(text));
    return issues.empty() ? std::string() : issues.front().path;
  };
  CHECK(first(R"({})") == "");
  CHECK_FALSE(s.validate(Json::parse("{}")).empty());
  CHECK(first(R"({"n": 2.5})") == "/n");
  CHECK(first(R"({"n": 5})") == "/n");
  CHECK(first(R"({"n": 0})") == "/n");
  CHECK(first(R"({"n": 1, "v": [1]})") == "/v");
  CHECK(first(R"({"n": 1, "v": [1, 1]})") == "/v");
  CHECK(first(R"({"n": 1, "v": [1, "x"]})") == "/v/1");
  CHECK(first(R"({"n": 1, "k": "c"})") == "/k");
  CHECK(first(R"({"n": 1, "r": 0})") == "/r");
  CHECK(first(R"({"n": 1, "o": {}})") == "/o");
  CHECK(first(R"({"n": 1, "extra": 1})") == "/extra");
}

TEST_CASE("shipped schemas") {
  CHECK(config_schema().validate(Json::parse(R"({"metric": "berwald", "suite": ["cfc"]})")).empty());
  CHECK_FALSE(config_schema().validate(Json::parse(R"({"metric": "berwald"})")).empty());
  CHECK_FALSE(config_schema().validate(Json::parse(R"({"metric": "berwald", "suite": []})")).empty());
  CHECK_FALSE(config_schema().validate(Json::parse(R"({"metric": "berwald", "suite": ["cfc"], "samples": 0})")).empty());
  CHECK(metric_schema().validate(metric_document({})).empty());
  CHECK_FALSE(metric_schema().validate(Json::parse(R"({"finsq_metric": 1, "name": "x"})")).empty());
}

TEST_CASE("parse_config") {
  SUBCASE("berwald cfc defaults") {
    const auto c = config_of(R"({"metric": "berwald", "suite": ["cfc"]})");
    REQUIRE(c.flag_curvature);
    CHECK(*c.flag_curvature == 0.0);
    CHECK(c.samples == 100);
    CHECK(c.seed == 0);
    CHECK(c.max_x == 0.8);
    CHECK(c.tolerance("cfc") == 1e-6);
    CHECK(c.tolerance("deformation") == 1e-10);
  }
  SUBCASE("unknown suite") {
    const auto msg = config_error(R"({"metric": "berwald", "suite": ["nonsense"]})");
    CHECK(contains(msg, "/suite/0"));
  }
  SUBCASE("construct source") {
    const auto c = config_of(R"({"construct": {"dim": 4, "c": 1.0, "d": 0.5, "factor": "sphere"}, "suite": ["einstein"]})");
    CHECK(c.metric->warped);
    CHECK(c.metric->bar);
    CHECK(c.metric->nontrivial_square);
    REQUIRE(c.einstein_scale);
    CHECK(*c.einstein_scale == 0.0);
    CHECK(c.echo()["metric"]["construct"]["dim"] == 4);
  }
  SUBCASE("overrides") {
    const auto c = config_of(R"({"metric": "sphere", "params": {"dim": 3, "kappa": 2.0}, "suite": ["cfc"],
                                 "samples": 7, "seed": 9, "tolerances": {"cfc": 1e-3},
                                 "domain": {"max_x": 0.5, "b_cap": 0.5}, "backend": "finite-difference"})");
    CHECK(*c.flag_curvature == 2.0);
    CHECK(c.samples == 7);
    CHECK(c.seed == 9);
    CHECK(c.tolerance("cfc") == 1e-3);
    CHECK(c.max_x == 0.5);
    CHECK(c.backend == DerivativeBackend::finite_difference);
  }
  SUBCASE("inline definitions") {
    const auto c = config_of(R"({"metric": {"name": "flat-square", "alpha": {"type": "euclidean", "dim": 3},
                                 "beta": {"type": "linear", "offset": [0.3, 0, 0]}, "phi": "square",
                                 "flag_curvature": 0}, "suite": ["cfc", "deformation"]})");
    CHECK(c.metric->name == "flat-square");
    CHECK(c.metric->pair);
    CHECK(c.metric->nontrivial_square);
  }
  SUBCASE("errors") {
    CHECK(contains(config_error(R"({"metric": "nope", "suite": ["pde"]})"), "unknown metric"));
    CHECK(contains(config_error(R"({"metric": "berwald", "params": {"kappa": 1}, "suite": ["pde"]})"), "/params/kappa"));
    CHECK(contains(config_error(R"({"metric": "randers-twisted", "suite": ["cfc"]})"), "flag curvature"));
    CHECK(contains(config_error(R"({"metric": "funk", "suite": ["deformation"]})"), "square metric"));
    CHECK(contains(config_error(R"({"metric": "berwald", "suite": ["warped"]})"), "warped"));
    CHECK(contains(config_error(R"({"suite": ["pde"]})"), "exactly one"));
    CHECK(contains(config_error(R"({"construct": {"dim": 4, "c": 0, "d": 0, "factor": "flat"}, "suite": ["pde"]})"),
                   "nonzero"));
    CHECK(contains(config_error(R"({"metric": {"alpha": {"type": "sphere"}, "beta": {"type": "zero"},
                                   "phi": "square"}, "suite": ["pde"]})"),
                   "/metric/alpha/dim"));
    CHECK(contains(config_error("{not json"), "not valid JSON"));
    CHECK_THROWS_AS(load_config(std::string(FINSQ_TEST_DATA) + "/does-not-exist.json"), ConfigError);
  }
}

TEST_CASE("metric documents") {
  const auto doc = metric_document({3, 1.0, 0.0, "sphere"});
  const auto e = load_metric_document(doc);
  CHECK(e.warped);
  REQUIRE(e.flag_curvature);
  CHECK(*e.flag_curvature == 0.0);
  CHECK(e.source == doc);

  const auto from_file = config_of(R"({"metric": "warped4.json", "suite": ["einstein"]})");
  CHECK(from_file.metric->name == "warped-sphere-n4");

  auto bad = doc;
  bad["finsq_metric"] = 2;
  CHECK_THROWS_AS(load_metric_document(bad), ConfigError);
}

TEST_CASE("run_suites examples") {
  SUBCASE("berwald constant flag curvature zero") {
    const auto r = run_suites(load_config(std::string(FINSQ_TEST_DATA) + "/berwald_cfc.json"));
    REQUIRE(r.suites.size() == 1);
    CHECK(r.pass());
    CHECK(r.suites[0].samples_used == 100);
    CHECK(r.suites[0].max_residual() < 1e-6);
  }
  SUBCASE("euclidean einstein") {
    const auto r = run_suites(config_of(R"({"metric": "euclidean", "suite": ["einstein"]})"));
    CHECK(r.pass());
    CHECK(r.suites[0].max_residual() == 0.0);
    CHECK(r.suites[0].samples_used == 100);
  }
  SUBCASE("negative control K = 1") {
    const auto r = run_suites(config_of(R"({"metric": "berwald", "suite": ["cfc"], "flag_curvature": 1})"));
    CHECK_FALSE(r.pass());
    CHECK(r.suites[0].max_residual() > 0.1);
  }
  SUBCASE("constructed n = 3 is flat") {
    const auto r = run_suites(config_of(R"({"construct": {"dim": 3, "c": 1, "d": 0, "factor": "sphere"},
                                             "suite": ["einstein", "cfc", "warped"], "samples": 40})"));
    CHECK(r.pass());
  }
  SUBCASE("einstein scale fitted when unknown") {
    const auto r = run_suites(config_of(R"({"metric": "conformal-exp", "suite": ["einstein"], "samples": 20})"));
    CHECK_FALSE(r.pass());
    CHECK(r.suites[0].constant("einstein_scale_fitted") < 0.0);
  }
  SUBCASE("all samples rejected") {
    const auto r = run_suites(config_of(R"({"metric": "berwald-family", "params": {"c": 0, "a": [0.95, 0, 0]},
                                             "suite": ["cfc"], "samples": 5})"));
    CHECK_FALSE(r.pass());
    CHECK(r.suites[0].samples_used == 0);
    CHECK(r.suites[0].samples_skipped == 5);
    CHECK_FALSE(r.suites[0].reason.empty());
  }
  SUBCASE("failed precondition") {
    const auto r = run_suites(config_of(R"({"metric": {"alpha": {"type": "euclidean", "dim": 3},
                                             "beta": {"type": "linear", "matrix": [[0, 1, 0], [0, 0, 0], [0, 0, 0]]},
                                             "phi": "square"}, "suite": ["spray-deform"], "samples": 10})"));
    CHECK_FALSE(r.pass());
    CHECK_FALSE(r.suites[0].reason.empty());
  }
}

TEST_CASE("reports") {
  const auto c = config_of(R"({"metric": "funk", "suite": ["cfc", "douglas", "closed", "pde"], "samples": 25,
                               "seed": 42})");
  const auto a = run_suites(c);
  CHECK(a.pass());
  const Json j = a.to_json();
  CHECK(report_schema().validate(j).empty());
  CHECK(j["timing"]["wall_time"].is_number());
  CHECK_FALSE(a.to_json(false).contains("timing"));
  CHECK(j["config"]["samples"] == 25);
  CHECK(j["suites"][0]["fitted_constants"]["flag_curvature"] == -0.25);

  SUBCASE("determinism across runs and worker counts") {
    setenv("FINSQ_THREADS", "1", 1);
    const auto b = run_suites(c);
    setenv("FINSQ_THREADS", "3", 1);
    const auto d = run_suites(c);
    unsetenv("FINSQ_THREADS");
    CHECK(a.to_json(false).dump() == b.to_json(false).dump());
    CHECK(a.to_json(false).dump() == d.to_json(false).dump());
  }
  SUBCASE("seed changes samples") {
    auto other = c;
    other.seed = 43;
    const auto b = run_suites(other);
    CHECK(a.to_json(false)["suites"][0] != b.to_json(false)["suites"][0]);
  }
}

TEST_CASE("builtins build") {
  for (const auto& b : list_builtins()) {
    CAPTURE(b.name);
    const auto e = make_builtin(b.name);
    REQUIRE(e.metric);
    const Eigen::VectorXd x = e.metric->chart_center();
    CHECK(e.metric->in_domain(x));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(e.metric->dim());
    y(0) = 1.0;
    CHECK(std::isfinite(f_value(*e.metric, x, y)));
  }
}
