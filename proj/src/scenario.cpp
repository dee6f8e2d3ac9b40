#include "crossdiff/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#include "crossdiff/manifold.hpp"

namespace crossdiff {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ScenarioError("unknown key \"" + it.key() + "\" at " + path);
  }
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key))
    throw ScenarioError("missing key \"" + key + "\" at " + path);
  const auto& v = j.at(key);
  if (!v.is_number())
    throw ScenarioError("key \"" + key + "\" at " + path + " must be a number");
  return v.get<double>();
}

double get_number_or(const json& j, const std::string& key, double fallback,
                     const std::string& path) {
  if (!j.contains(key)) return fallback;
  return get_number(j, key, path);
}

}  // namespace

ModelParams params_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path + " must be an object");
  static const std::set<std::string> keys = {
      "d_a",    "d_b",    "d_v",     "eta_a",   "eta_b", "eta_v1", "eta_v2",
      "a",      "b",      "c",       "d",       "gamma_a", "gamma_b",
      "a_f",    "b_f",    "c_f",     "d_f",     "alpha", "beta",   "A_off",
      "B_off"};
  reject_unknown_keys(j, keys, path);
  ModelParams p;
  p.d_a = get_number(j, "d_a", path);
  p.d_b = get_number(j, "d_b", path);
  p.d_v = get_number(j, "d_v", path);
  p.eta_a = get_number(j, "eta_a", path);
  p.eta_b = get_number(j, "eta_b", path);
  p.eta_v1 = get_number(j, "eta_v1", path);
  p.eta_v2 = get_number(j, "eta_v2", path);
  p.a = get_number(j, "a", path);
  p.b = get_number(j, "b", path);
  p.c = get_number(j, "c", path);
  p.d = get_number(j, "d", path);
  p.gamma_a = get_number(j, "gamma_a", path);
  p.gamma_b = get_number(j, "gamma_b", path);
  p.a_f = get_number(j, "a_f", path);
  p.b_f = get_number(j, "b_f", path);
  p.c_f = get_number(j, "c_f", path);
  p.d_f = get_number(j, "d_f", path);
  p.alpha = get_number(j, "alpha", path);
  p.beta = get_number(j, "beta", path);
  p.A_off = get_number(j, "A_off", path);
  p.B_off = get_number(j, "B_off", path);
  return p;
}

json params_to_json(const ModelParams& p) {
  return json{{"d_a", p.d_a},         {"d_b", p.d_b},
              {"d_v", p.d_v},         {"eta_a", p.eta_a},
              {"eta_b", p.eta_b},     {"eta_v1", p.eta_v1},
              {"eta_v2", p.eta_v2},   {"a", p.a},
              {"b", p.b},             {"c", p.c},
              {"d", p.d},             {"gamma_a", p.gamma_a},
              {"gamma_b", p.gamma_b}, {"a_f", p.a_f},
              {"b_f", p.b_f},         {"c_f", p.c_f},
              {"d_f", p.d_f},         {"alpha", p.alpha},
              {"beta", p.beta},       {"A_off", p.A_off},
              {"B_off", p.B_off}};
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  reject_unknown_keys(j, {"params", "grid", "initial", "solver", "outputs"},
                      "scenario");
  if (!j.contains("params")) throw ScenarioError("missing key \"params\"");

  Scenario s;
  s.params = params_from_json(j.at("params"));

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown_keys(g, {"L", "n"}, "grid");
    s.grid.length = get_number_or(g, "L", 1.0, "grid");
    if (g.contains("n")) {
      if (!g.at("n").is_number_integer())
        throw ScenarioError("key \"n\" at grid must be an integer");
      s.grid.cells = g.at("n").get<int>();
    }
  }
  check_grid(s.grid);

  if (j.contains("initial")) {
    const auto& ini = j.at("initial");
    reject_unknown_keys(ini,
                        {"family", "amplitude_ua", "amplitude_ub", "amplitude_v",
                         "offset_ua", "offset_ub", "offset_v", "center", "width",
                         "well_prepared"},
                        "initial");
    const std::string fam = ini.value("family", std::string("cosine-bump"));
    if (fam == "constant")
      s.initial.family = InitialFamily::Constant;
    else if (fam == "cosine-bump")
      s.initial.family = InitialFamily::CosineBump;
    else if (fam == "gaussian")
      s.initial.family = InitialFamily::Gaussian;
    else
      throw ScenarioError("unknown initial family \"" + fam +
                          "\" (expected constant, cosine-bump or gaussian)");
    s.initial.amplitude_ua = get_number_or(ini, "amplitude_ua", 0.4, "initial");
    s.initial.amplitude_ub = get_number_or(ini, "amplitude_ub", 0.4, "initial");
    s.initial.amplitude_v = get_number_or(ini, "amplitude_v", 0.5, "initial");
    s.initial.offset_ua = get_number_or(ini, "offset_ua", 0.0, "initial");
    s.initial.offset_ub = get_number_or(ini, "offset_ub", 0.0, "initial");
    s.initial.offset_v = get_number_or(ini, "offset_v", 0.0, "initial");
    s.initial.center = get_number_or(ini, "center", 0.5 * s.grid.length, "initial");
    s.initial.width = get_number_or(ini, "width", 0.5 * s.grid.length, "initial");
    if (ini.contains("well_prepared")) {
      if (!ini.at("well_prepared").is_boolean())
        throw ScenarioError("key \"well_prepared\" at initial must be a boolean");
      s.initial.well_prepared = ini.at("well_prepared").get<bool>();
    }
  } else {
    s.initial.center = 0.5 * s.grid.length;
    s.initial.width = 0.5 * s.grid.length;
  }

  if (j.contains("solver")) {
    const auto& so = j.at("solver");
    reject_unknown_keys(
        so, {"dt", "cfl_safety", "t_end", "monitor_every", "positivity_retry_limit"},
        "solver");
    s.solver.dt = get_number_or(so, "dt", s.solver.dt, "solver");
    s.solver.cfl_safety = get_number_or(so, "cfl_safety", s.solver.cfl_safety, "solver");
    s.solver.t_end = get_number_or(so, "t_end", s.solver.t_end, "solver");
    if (so.contains("monitor_every"))
      s.solver.monitor_every = so.at("monitor_every").get<int>();
    if (so.contains("positivity_retry_limit"))
      s.solver.positivity_retry_limit = so.at("positivity_retry_limit").get<int>();
  }

  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    reject_unknown_keys(o, {"directory", "snapshot_times", "plots"}, "outputs");
    if (o.contains("directory"))
      s.outputs.directory = o.at("directory").get<std::string>();
    if (o.contains("snapshot_times")) {
      for (const auto& t : o.at("snapshot_times"))
        s.outputs.snapshot_times.push_back(t.get<double>());
    }
    if (o.contains("plots")) s.outputs.plots = o.at("plots").get<bool>();
  }
  if (s.outputs.directory == "out") {
    if (const char* env = std::getenv("CROSSDIFF_OUTDIR"); env && *env)
      s.outputs.directory = env;
  }

  // cross-field validation
  const HypothesisReport rep = validate_params(s.params);
  if (!rep.ok) {
    std::string msg = "parameter hypotheses violated:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw ScenarioError(msg);
  }
  try {
    check_config(s.solver);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("solver: ") + e.what());
  }
  for (double t : s.outputs.snapshot_times) {
    if (t < 0.0 || t > s.solver.t_end + 1e-12)
      throw ScenarioError("snapshot time " + std::to_string(t) +
                          " outside [0, t_end]");
  }
  const InitialSpec& ini = s.initial;
  const double amps[] = {ini.amplitude_ua, ini.amplitude_ub, ini.amplitude_v,
                         ini.offset_ua, ini.offset_ub, ini.offset_v};
  for (double a : amps)
    if (!(a >= 0.0))
      throw ScenarioError("initial amplitudes and offsets must be nonnegative");
  if (!(ini.width > 0.0)) throw ScenarioError("initial width must be positive");
  return s;
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  const char* family = s.initial.family == InitialFamily::Constant ? "constant"
                       : s.initial.family == InitialFamily::CosineBump
                           ? "cosine-bump"
                           : "gaussian";
  return json{
      {"params", params_to_json(s.params)},
      {"grid", {{"L", s.grid.length}, {"n", s.grid.cells}}},
      {"initial",
       {{"family", family},
        {"amplitude_ua", s.initial.amplitude_ua},
        {"amplitude_ub", s.initial.amplitude_ub},
        {"amplitude_v", s.initial.amplitude_v},
        {"offset_ua", s.initial.offset_ua},
        {"offset_ub", s.initial.offset_ub},
        {"offset_v", s.initial.offset_v},
        {"center", s.initial.center},
        {"width", s.initial.width},
        {"well_prepared", s.initial.well_prepared}}},
      {"solver",
       {{"dt", s.solver.dt},
        {"cfl_safety", s.solver.cfl_safety},
        {"t_end", s.solver.t_end},
        {"monitor_every", s.solver.monitor_every},
        {"positivity_retry_limit", s.solver.positivity_retry_limit}}},
      {"outputs",
       {{"directory", s.outputs.directory},
        {"snapshot_times", s.outputs.snapshot_times},
        {"plots", s.outputs.plots}}}};
}

namespace {

double shape_value(const InitialSpec& ini, double x, double amplitude) {
  switch (ini.family) {
    case InitialFamily::Constant:
      return amplitude;
    case InitialFamily::CosineBump: {
      const double r = x - ini.center;
      if (std::abs(r) > 0.5 * ini.width) return 0.0;
      const double cosv = std::cos(kPi * r / ini.width);
      return amplitude * cosv * cosv * cosv * cosv;
    }
    case InitialFamily::Gaussian: {
      const double z = (x - ini.center) / ini.width;
      return amplitude * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

}  // namespace

InitialFields build_initial_fields(const Scenario& s) {
  const Array x = s.grid.centers();
  InitialFields f{Field(s.grid), Field(s.grid), Field(s.grid)};
  for (int i = 0; i < s.grid.cells; ++i) {
    f.u_a.values[i] = shape_value(s.initial, x[i], s.initial.amplitude_ua) +
                      s.initial.offset_ua;
    f.u_b.values[i] = shape_value(s.initial, x[i], s.initial.amplitude_ub) +
                      s.initial.offset_ub;
    f.v.values[i] =
        shape_value(s.initial, x[i], s.initial.amplitude_v) + s.initial.offset_v;
  }
  if (s.initial.well_prepared) {
    for (int i = 0; i < s.grid.cells; ++i) {
      const double u = f.u_a.values[i] + f.u_b.values[i];
      const ManifoldPoint pt = solve_manifold(u, f.v.values[i], s.params);
      f.u_b.values[i] = pt.u_b_star;
      f.u_a.values[i] = pt.u_a_star;
    }
  }
  return f;
}

FastState build_fast_initial(const Scenario& s, double eps) {
  InitialFields f = build_initial_fields(s);
  FastState st;
  st.t = 0.0;
  st.eps = eps;
  st.u_a = std::move(f.u_a);
  st.u_b = std::move(f.u_b);
  st.v = std::move(f.v);
  return st;
}

LimitState build_limit_initial(const Scenario& s) {
  InitialFields f = build_initial_fields(s);
  LimitState st;
  st.t = 0.0;
  st.u = Field(s.grid, f.u_a.values + f.u_b.values);
  st.v = std::move(f.v);
  return st;
}

}  // namespace crossdiff
