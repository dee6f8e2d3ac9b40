#include <doctest.h>

#include <fstream>
#include <sstream>

#include "crossdiff/manifold.hpp"
#include "crossdiff/scenario.hpp"

using namespace crossdiff;

namespace {

std::string minimal_doc() {
  return R"({"params": {
    "d_a": 1.0, "d_b": 1.05, "d_v": 1.0,
    "eta_a": 1.0, "eta_b": 1.0, "eta_v1": 1.0, "eta_v2": 1.0,
    "a": 1.0, "b": 1.0, "c": 0.5, "d": 0.5,
    "gamma_a": 0.1, "gamma_b": 0.1,
    "a_f": 0.5, "b_f": 0.5, "c_f": 0.5, "d_f": 0.5,
    "alpha": 1.0, "beta": 1.0, "A_off": 1.0, "B_off": 1.0
  }})";
}

std::string repo_file(const std::string& rel) {
  std::ifstream is(std::string(CROSSDIFF_SOURCE_DIR) + "/" + rel);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("minimal document gets defaults filled and echoed") {
  const Scenario s = parse_scenario(minimal_doc());
  CHECK(s.grid.cells == 128);
  CHECK(s.grid.length == 1.0);
  CHECK(s.solver.t_end == 0.25);
  CHECK(s.initial.family == InitialFamily::CosineBump);
  const nlohmann::json echo = scenario_to_json(s);
  CHECK(echo.at("grid").at("n") == 128);
  CHECK(echo.at("initial").at("family") == "cosine-bump");
  // echo parses back to the same scenario
  const Scenario s2 = scenario_from_json(echo);
  CHECK(scenario_to_json(s2) == echo);
}

TEST_CASE("unknown keys are rejected by name") {
  auto doc = nlohmann::json::parse(minimal_doc());
  doc["params"]["d_aa"] = 1.0;
  try {
    scenario_from_json(doc);
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("d_aa") != std::string::npos);
  }

  auto doc2 = nlohmann::json::parse(minimal_doc());
  doc2["solvre"] = nlohmann::json::object();
  CHECK_THROWS_AS(scenario_from_json(doc2), ScenarioError);
}

TEST_CASE("hypothesis violations quote the hypothesis") {
  auto doc = nlohmann::json::parse(minimal_doc());
  doc["params"]["beta"] = 0.5;
  doc["params"]["alpha"] = 0.5;
  doc["params"]["B_off"] = 0.0;
  try {
    scenario_from_json(doc);
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("(H1)") != std::string::npos);
  }
}

TEST_CASE("snapshot times outside [0, t_end] are rejected") {
  auto doc = nlohmann::json::parse(minimal_doc());
  doc["outputs"] = {{"snapshot_times", {0.0, 1.0}}};
  CHECK_THROWS_AS(scenario_from_json(doc), ScenarioError);
}

TEST_CASE("params JSON round-trip") {
  ModelParams p;
  p.alpha = 1.25;
  p.B_off = 0.0;
  p.beta = 2.0;
  const nlohmann::json j = params_to_json(p);
  const ModelParams q = params_from_json(j);
  CHECK(q.alpha == p.alpha);
  CHECK(q.B_off == p.B_off);
  CHECK(params_to_json(q) == j);
  // missing key
  nlohmann::json broken = j;
  broken.erase("d_v");
  CHECK_THROWS_AS(params_from_json(broken), ScenarioError);
}

TEST_CASE("well_prepared projects the initial split onto the manifold") {
  auto doc = nlohmann::json::parse(minimal_doc());
  doc["initial"] = {{"family", "gaussian"},
                    {"amplitude_ua", 0.7},
                    {"amplitude_ub", 0.2},
                    {"offset_ua", 0.05},
                    {"offset_ub", 0.05},
                    {"offset_v", 0.1},
                    {"amplitude_v", 0.3},
                    {"center", 0.4},
                    {"width", 0.15},
                    {"well_prepared", true}};
  const Scenario s = scenario_from_json(doc);
  const InitialFields f = build_initial_fields(s);
  for (int i = 0; i < s.grid.cells; i += 7) {
    const QEval e = eval_Q(f.u_a.values[i], f.u_b.values[i], f.v.values[i], s.params);
    CHECK(std::abs(e.Q) <= 1e-10);
  }
  const LimitState lim = build_limit_initial(s);
  CHECK(lim.u.values[3] ==
        doctest::Approx(f.u_a.values[3] + f.u_b.values[3]).epsilon(1e-15));
}

TEST_CASE("constant family is flat; cosine-bump is supported in the bump") {
  auto doc = nlohmann::json::parse(minimal_doc());
  doc["initial"] = {{"family", "constant"},
                    {"amplitude_ua", 0.3},
                    {"amplitude_ub", 0.4},
                    {"amplitude_v", 0.5}};
  const Scenario s = scenario_from_json(doc);
  const InitialFields f = build_initial_fields(s);
  CHECK(f.u_a.values.minCoeff() == 0.3);
  CHECK(f.u_a.values.maxCoeff() == 0.3);
  CHECK(f.v.values[0] == 0.5);

  auto doc2 = nlohmann::json::parse(minimal_doc());
  doc2["initial"] = {{"family", "cosine-bump"},
                     {"center", 0.5},
                     {"width", 0.25}};
  const Scenario s2 = scenario_from_json(doc2);
  const InitialFields f2 = build_initial_fields(s2);
  CHECK(f2.u_a.values[0] == 0.0);  // outside the support
  CHECK(f2.u_a.values[s2.grid.cells / 2] > 0.3);
}

TEST_CASE("the shipped baseline scenario parses and satisfies the hypotheses") {
  const Scenario s = parse_scenario(repo_file("scenarios/baseline.json"));
  CHECK(s.grid.cells == 128);
  CHECK(s.params.d_b / s.params.d_a == doctest::Approx(1.05));
  CHECK(validate_params(s.params).ok);
}

TEST_CASE("malformed JSON is reported as such") {
  CHECK_THROWS_AS(parse_scenario("{ not json"), ScenarioError);
}

TEST_CASE("CROSSDIFF_OUTDIR provides the default output directory") {
  setenv("CROSSDIFF_OUTDIR", "/tmp/crossdiff_env_dir", 1);
  const Scenario s = parse_scenario(minimal_doc());
  CHECK(s.outputs.directory == "/tmp/crossdiff_env_dir");
  unsetenv("CROSSDIFF_OUTDIR");
  const Scenario t = parse_scenario(minimal_doc());
  CHECK(t.outputs.directory == "out");
}

TEST_CASE("the shipped asymmetric scenario parses (B_off = 0 with beta >= 1)") {
  const Scenario s = parse_scenario(repo_file("scenarios/asymmetric.json"));
  CHECK(s.params.B_off == 0.0);
  CHECK(s.params.beta > 1.0);
  CHECK(validate_params(s.params).ok);
  CHECK(s.initial.family == InitialFamily::Gaussian);
}
