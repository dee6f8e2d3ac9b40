/* Scenario documents: JSON in, validated configuration out. Unknown keys are
 * rejected by path so config typos cannot silently change an experiment. */
#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "crossdiff/model.hpp"
#include "crossdiff/state.hpp"

namespace crossdiff {

/// Scenario or parameter document rejected; message names the offending key
/// or quotes the violated hypothesis.
struct ScenarioError : std::invalid_argument {
  explicit ScenarioError(const std::string& msg) : std::invalid_argument(msg) {}
};

enum class InitialFamily { Constant, CosineBump, Gaussian };

/// Initial-data family. cosine-bump is amplitude * cos^4(pi (x-center)/width)
/// supported on |x-center| <= width/2; gaussian is
/// amplitude * exp(-(x-center)^2 / (2 width^2)); constant ignores shape.
/// Every species gets `offset_*` added. well_prepared replaces u_b by
/// u_b*(u_a+u_b, v), which puts the data on the slow manifold.
struct InitialSpec {
  InitialFamily family = InitialFamily::CosineBump;
  double amplitude_ua = 0.4;
  double amplitude_ub = 0.4;
  double amplitude_v = 0.5;
  double offset_ua = 0.0;
  double offset_ub = 0.0;
  double offset_v = 0.0;
  double center = 0.5;
  double width = 0.5;
  bool well_prepared = false;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<double> snapshot_times;
  bool plots = false;
};

struct Scenario {
  ModelParams params;
  Grid grid;
  InitialSpec initial;
  SolverConfig solver;
  OutputSpec outputs;
};

/// Strict ModelParams (de)serialization: exactly the documented field names,
/// unknown keys are an error.
ModelParams params_from_json(const nlohmann::json& j,
                             const std::string& path = "params");
nlohmann::json params_to_json(const ModelParams& p);

/// Parses and fully validates a scenario document. Defaults are applied;
/// scenario_to_json echoes the effective configuration.
Scenario parse_scenario(const std::string& text);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

/// Samples the initial family on the grid. well_prepared projection included.
struct InitialFields {
  Field u_a;
  Field u_b;
  Field v;
};
InitialFields build_initial_fields(const Scenario& s);
FastState build_fast_initial(const Scenario& s, double eps);
LimitState build_limit_initial(const Scenario& s);

}  // namespace crossdiff
