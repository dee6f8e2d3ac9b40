/* crossdiff: scenario-driven experiments for a two-species slow-fast
 * competition system and its cross-diffusion limit.
 *
 * Subcommands:
 *   validate           check a scenario against the model hypotheses
 *   manifold           tabulate the slow-manifold map on a (u, v) lattice
 *   simulate           integrate the fast or the limit system, write CSVs
 *   converge           eps-sweep against the limit reference, fit rates
 *   layer              initial-layer study at fixed eps
 *   energy             per-time-step energy diagnostics of a fast run
 *   energy-uniformity  sup-in-time energy norms across an eps sweep
 *
 * Exit codes: 0 success, 1 validation error, 2 solver failure, 64 usage.
 */
#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "crossdiff/energy.hpp"
#include "crossdiff/errors.hpp"
#include "crossdiff/experiments.hpp"
#include "crossdiff/fast_solver.hpp"
#include "crossdiff/io.hpp"
#include "crossdiff/limit_solver.hpp"
#include "crossdiff/manifold.hpp"
#include "crossdiff/scenario.hpp"

using namespace crossdiff;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ScenarioError("cannot open scenario file " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void write_snapshot_fast(const std::string& path, const FastState& s) {
  const Array x = s.u_a.grid.centers();
  write_columns_csv(path, {"x", "u_a", "u_b", "v"},
                    {&x, &s.u_a.values, &s.u_b.values, &s.v.values});
}

void write_snapshot_limit(const std::string& path, const LimitState& s) {
  const Array x = s.u.grid.centers();
  write_columns_csv(path, {"x", "u", "v"}, {&x, &s.u.values, &s.v.values});
}

int run_simulate(const Scenario& sc, const std::string& system, double eps,
                 const std::vector<std::string>& argv) {
  Timer timer;
  const std::string dir = sc.outputs.directory;
  ensure_directory(dir);
  std::vector<std::string> outputs;

  // map requested snapshot times to monitor steps
  std::set<long> snap_steps;
  const long n_steps = std::max(
      1L, std::lround(std::ceil(sc.solver.t_end / sc.solver.dt - 1e-9)));
  for (double t : sc.outputs.snapshot_times)
    snap_steps.insert(std::lround(t / (sc.solver.t_end / n_steps)));

  nlohmann::json settings{{"system", system}};
  if (system == "fast") {
    settings["eps"] = eps;
    FastMonitorOptions opt;
    int snap_id = 0;
    opt.observer = [&](const FastState& s, const MonitorSample&) {
      const long step = std::lround(s.t / (sc.solver.t_end / n_steps));
      if (snap_steps.count(step)) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_fast_%03d.csv", snap_id++);
        write_snapshot_fast(dir + "/" + name, s);
        outputs.push_back(name);
      }
    };
    const FastRunResult run =
        integrate_fast(build_fast_initial(sc, eps), sc.solver, sc.params, opt);
    write_monitor_csv(dir + "/monitor_fast.csv", run.log, true);
    outputs.push_back("monitor_fast.csv");
    settings["dt_effective"] = run.dt_effective;
    settings["steps"] = run.steps;
    if (run.log.any_violation())
      std::cerr << "warning: a-priori bound violated during the run\n";
  } else {
    LimitMonitorOptions opt;
    int snap_id = 0;
    opt.observer = [&](const LimitState& s, const MonitorSample&) {
      const long step = std::lround(s.t / (sc.solver.t_end / n_steps));
      if (snap_steps.count(step)) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_limit_%03d.csv", snap_id++);
        write_snapshot_limit(dir + "/" + name, s);
        outputs.push_back(name);
      }
    };
    const LimitRunResult run =
        integrate_limit(build_limit_initial(sc), sc.solver, sc.params, opt);
    write_monitor_csv(dir + "/monitor_limit.csv", run.log, false);
    outputs.push_back("monitor_limit.csv");
    settings["dt_effective"] = run.dt_effective;
    settings["steps"] = run.steps;
  }
  write_manifest(dir + "/manifest_simulate.json", "simulate", argv,
                 scenario_to_json(sc), settings, outputs, timer.seconds());
  std::cout << "wrote " << outputs.size() << " files to " << dir << "\n";
  return 0;
}

int run_converge(const Scenario& sc, const std::vector<double>& eps_list,
                 bool prepared, int jobs, const std::string& reference,
                 const std::vector<std::string>& argv) {
  Timer timer;
  const std::string dir = sc.outputs.directory;
  ensure_directory(dir);
  const ConvergenceReference ref = reference == "limit-solver"
                                       ? ConvergenceReference::LimitSolver
                                       : ConvergenceReference::ProjectedScheme;
  const ConvergenceResult res = run_convergence(sc, eps_list, prepared, jobs, ref);

  CsvTable rows;
  rows.header = {"eps", "err_u", "err_v", "err_ub", "q_norm", "eps_init"};
  for (const auto& r : res.rows)
    rows.rows.push_back({r.eps, r.err_u, r.err_v, r.err_ub, r.q_norm, r.eps_init});
  write_csv(dir + "/convergence_rows.csv", rows);

  CsvTable fits;
  fits.header = {"column", "slope", "intercept", "r_squared", "n_points"};
  nlohmann::json fits_json;
  for (const auto& [name, f] : res.fits) {
    fits_json[name] = {{"slope", f.slope},
                       {"intercept", f.intercept},
                       {"r_squared", f.r_squared}};
    std::cout << name << ": slope " << f.slope << " (r^2 " << f.r_squared
              << ")\n";
  }
  // CSV wants numeric cells; write one row per column with an index
  std::ofstream fcsv(dir + "/convergence_fits.csv");
  fcsv << "column,slope,intercept,r_squared,n_points\n";
  for (const auto& [name, f] : res.fits)
    fcsv << name << "," << format_double(f.slope) << ","
         << format_double(f.intercept) << "," << format_double(f.r_squared)
         << "," << f.n_points << "\n";
  fcsv.close();

  std::vector<std::string> outputs{"convergence_rows.csv", "convergence_fits.csv"};
  if (sc.outputs.plots) {
    std::vector<PlotSeries> series;
    for (const char* col : {"err_u", "err_v", "err_ub", "q_norm"}) {
      PlotSeries ps;
      ps.label = col;
      for (const auto& r : res.rows) {
        ps.x.push_back(r.eps);
        double y = r.err_u;
        if (std::string(col) == "err_v") y = r.err_v;
        if (std::string(col) == "err_ub") y = r.err_ub;
        if (std::string(col) == "q_norm") y = r.q_norm;
        ps.y.push_back(y);
      }
      const RateFit& f = res.fit(col);
      ps.with_fit_line = true;
      ps.fit_slope = f.slope;
      ps.fit_intercept = f.intercept;
      series.push_back(std::move(ps));
    }
    write_loglog_svg(dir + "/convergence.svg", "error vs eps", "eps", "error",
                     series);
    outputs.push_back("convergence.svg");
  }
  write_manifest(dir + "/manifest_converge.json", "converge", argv,
                 scenario_to_json(sc),
                 {{"eps_list", eps_list},
                  {"prepared", prepared},
                  {"jobs", jobs},
                  {"reference", reference},
                  {"dt_used", res.dt_used},
                  {"fits", fits_json}},
                 outputs, timer.seconds());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  static const std::set<std::string> known = {
      "validate", "manifold", "simulate",          "converge",
      "layer",    "energy",   "energy-uniformity", "-h",
      "--help",   "help"};
  if (argc < 2 || !known.count(argv[1])) {
    std::cerr << "usage: crossdiff "
                 "{validate|manifold|simulate|converge|layer|energy|energy-"
                 "uniformity} <scenario.json> [options]\n";
    return 64;
  }

  CLI::App app{"slow-fast competition system and its cross-diffusion limit"};
  app.require_subcommand(1);

  std::string scenario_path, system = "fast", eps_csv, eps_init_csv = "0.1",
                             p_csv = "2", out_override;
  double eps = 1e-3;
  int jobs = 1;
  bool prepared = true, unprepared = false, decay = false;
  int u_count = 21, v_count = 5;
  double u_min = 0.0, u_max = 2.0, v_min = 0.0, v_max = 1.0;
  std::string manifold_out;

  auto add_scenario = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "scenario JSON document")
        ->required();
    cmd->add_option("--output-dir", out_override,
                    "override outputs.directory from the scenario");
  };

  CLI::App* c_validate = app.add_subcommand("validate", "check a scenario");
  add_scenario(c_validate);

  CLI::App* c_manifold =
      app.add_subcommand("manifold", "tabulate the slow-manifold map");
  add_scenario(c_manifold);
  c_manifold->add_option("--u-min", u_min);
  c_manifold->add_option("--u-max", u_max);
  c_manifold->add_option("--u-count", u_count);
  c_manifold->add_option("--v-min", v_min);
  c_manifold->add_option("--v-max", v_max);
  c_manifold->add_option("--v-count", v_count);
  c_manifold->add_option("-o,--out", manifold_out, "write CSV here instead of stdout");

  CLI::App* c_simulate = app.add_subcommand("simulate", "integrate one system");
  add_scenario(c_simulate);
  c_simulate->add_option("--system", system, "fast or limit")
      ->check(CLI::IsMember({"fast", "limit"}));
  c_simulate->add_option("--eps", eps, "stiffness parameter for the fast system");

  CLI::App* c_converge = app.add_subcommand("converge", "eps-sweep and rate fits");
  add_scenario(c_converge);
  c_converge->add_option("--eps", eps_csv, "comma-separated eps list")->required();
  c_converge->add_flag("--unprepared", unprepared,
                       "keep the scenario's raw initial split");
  c_converge->add_option("--jobs", jobs, "parallel sweep workers");
  std::string reference = "projected";
  c_converge->add_option("--reference", reference,
                         "convergence reference: projected (the fast scheme's "
                         "eps->0 limit) or limit-solver")
      ->check(CLI::IsMember({"projected", "limit-solver"}));

  CLI::App* c_layer = app.add_subcommand("layer", "initial-layer study");
  add_scenario(c_layer);
  c_layer->add_option("--eps", eps, "fixed eps")->required();
  c_layer->add_option("--eps-init", eps_init_csv, "comma-separated eps_init list");
  c_layer->add_flag("--decay", decay, "also fit the early-time decay constant");

  CLI::App* c_energy = app.add_subcommand("energy", "fast-run energy diagnostics");
  add_scenario(c_energy);
  c_energy->add_option("--eps", eps, "stiffness parameter")->required();
  c_energy->add_option("--p", p_csv, "comma-separated energy exponents");

  CLI::App* c_uniformity =
      app.add_subcommand("energy-uniformity", "sup-in-time norms across eps");
  add_scenario(c_uniformity);
  c_uniformity->add_option("--eps", eps_csv, "comma-separated eps list")->required();
  c_uniformity->add_option("--p", p_csv, "comma-separated energy exponents");
  c_uniformity->add_option("--jobs", jobs, "parallel sweep workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  std::vector<std::string> argv_copy(argv, argv + argc);
  Timer timer;
  try {
    Scenario sc = parse_scenario(slurp(scenario_path));
    if (!out_override.empty()) sc.outputs.directory = out_override;

    if (c_validate->parsed()) {
      std::cout << "scenario ok\n" << scenario_to_json(sc).dump(2) << "\n";
      return 0;
    }

    if (c_manifold->parsed()) {
      std::ostringstream os;
      os << "u_tilde,v_tilde,u_a_star,u_b_star,du_ub,dv_ub,A_val\n";
      for (int iv = 0; iv < v_count; ++iv) {
        const double v = v_count > 1
                             ? v_min + (v_max - v_min) * iv / (v_count - 1.0)
                             : v_min;
        for (int iu = 0; iu < u_count; ++iu) {
          const double u = u_count > 1
                               ? u_min + (u_max - u_min) * iu / (u_count - 1.0)
                               : u_min;
          const ManifoldPoint pt = solve_manifold(u, v, sc.params);
          const ManifoldJacobian j = manifold_jacobian(pt, sc.params);
          const double A = sc.params.d_a * u +
                           (sc.params.d_b - sc.params.d_a) * pt.u_b_star;
          os << format_double(u) << "," << format_double(v) << ","
             << format_double(pt.u_a_star) << "," << format_double(pt.u_b_star)
             << "," << format_double(j.du_ub) << "," << format_double(j.dv_ub)
             << "," << format_double(A) << "\n";
        }
      }
      if (manifold_out.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream f(manifold_out);
        f << os.str();
        std::cout << "wrote " << manifold_out << "\n";
      }
      return 0;
    }

    if (c_simulate->parsed())
      return run_simulate(sc, system, eps, argv_copy);

    if (c_converge->parsed()) {
      prepared = !unprepared;
      return run_converge(sc, parse_list(eps_csv), prepared, jobs, reference,
                          argv_copy);
    }

    if (c_layer->parsed()) {
      const std::string dir = sc.outputs.directory;
      ensure_directory(dir);
      const LayerResult res = run_initial_layer(sc, eps, parse_list(eps_init_csv));
      CsvTable rows;
      rows.header = {"eps_init", "err_u", "err_ub"};
      for (const auto& r : res.rows)
        rows.rows.push_back({r.eps_init, r.err_u, r.err_ub});
      write_csv(dir + "/layer_rows.csv", rows);
      std::vector<std::string> outputs{"layer_rows.csv"};
      nlohmann::json settings{{"eps", eps}};
      if (decay) {
        const LayerDecayResult d =
            run_layer_decay(sc, eps, parse_list(eps_init_csv).back());
        CsvTable dec;
        dec.header = {"t", "manifold_dist"};
        for (size_t i = 0; i < d.t.size(); ++i)
          dec.rows.push_back({d.t[i], d.dist[i]});
        write_csv(dir + "/layer_decay.csv", dec);
        outputs.push_back("layer_decay.csv");
        settings["tau_fit"] = d.tau_fit;
        settings["tau_target"] = 2.0 * eps;
        std::cout << "decay time constant " << d.tau_fit << " (target 2*eps = "
                  << 2.0 * eps << ")\n";
      }
      write_manifest(dir + "/manifest_layer.json", "layer", argv_copy,
                     scenario_to_json(sc), settings, outputs, timer.seconds());
      return 0;
    }

    if (c_energy->parsed()) {
      const std::string dir = sc.outputs.directory;
      ensure_directory(dir);
      const std::vector<double> p_list = parse_list(p_csv);
      FastMonitorOptions opt;
      opt.energy_p = p_list;
      const FastRunResult run =
          integrate_fast(build_fast_initial(sc, eps), sc.solver, sc.params, opt);
      std::ofstream f(dir + "/energy.csv");
      f << "t";
      for (double pv : p_list) f << ",E_" << format_double(pv);
      f << ",i2_fast,q_l2,manifold_dist\n";
      for (const auto& m : run.log.samples) {
        f << format_double(m.t);
        for (double e : m.energies) f << "," << format_double(e);
        f << "," << format_double(m.i2_fast) << "," << format_double(m.q_l2)
          << "," << format_double(m.manifold_dist) << "\n";
      }
      f.close();
      write_manifest(dir + "/manifest_energy.json", "energy", argv_copy,
                     scenario_to_json(sc), {{"eps", eps}, {"p", p_list}},
                     {"energy.csv"}, timer.seconds());
      std::cout << "wrote energy.csv (" << run.log.samples.size() << " rows)\n";
      return 0;
    }

    if (c_uniformity->parsed()) {
      const std::string dir = sc.outputs.directory;
      ensure_directory(dir);
      const UniformityResult res = run_energy_uniformity(
          sc, parse_list(eps_csv), parse_list(p_csv), jobs);
      CsvTable table;
      table.header = {"eps", "p", "sup_Ep", "sup_ua_qp", "sup_ub_rp"};
      for (const auto& r : res.rows)
        table.rows.push_back({r.eps, r.p, r.sup_Ep, r.sup_ua_qp, r.sup_ub_rp});
      write_csv(dir + "/uniformity_table.csv", table);
      CsvTable ratios;
      ratios.header = {"p", "ratio_Ep", "ratio_ua", "ratio_ub"};
      for (const auto& r : res.ratios) {
        ratios.rows.push_back({r.p, r.ratio_Ep, r.ratio_ua, r.ratio_ub});
        std::cout << "p=" << r.p << ": max/min E_p " << r.ratio_Ep << ", |u_a| "
                  << r.ratio_ua << ", |u_b| " << r.ratio_ub << "\n";
      }
      write_csv(dir + "/uniformity_ratios.csv", ratios);
      write_manifest(dir + "/manifest_energy_uniformity.json",
                     "energy-uniformity", argv_copy, scenario_to_json(sc),
                     {{"eps_list", parse_list(eps_csv)}, {"p", parse_list(p_csv)}},
                     {"uniformity_table.csv", "uniformity_ratios.csv"},
                     timer.seconds());
      return 0;
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 64;
}
