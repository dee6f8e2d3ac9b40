/* Output plumbing: CSV tables with fixed round-trippable formatting, run
 * manifests that echo every effective input, and minimal SVG log-log plots. */
#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "crossdiff/state.hpp"

namespace crossdiff {

/// Doubles formatted with %.17g so reruns byte-compare.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);

/// Per-cell columns (x first) for snapshot files.
void write_columns_csv(const std::string& path,
                       const std::vector<std::string>& names,
                       const std::vector<const Array*>& columns);

void write_monitor_csv(const std::string& path, const MonitorLog& log,
                       bool fast_columns);

/// Manifest: subcommand, argv, effective scenario, per-command settings,
/// produced files, versions and wall time. Rerunning the same subcommand on
/// manifest["scenario"] reproduces every CSV byte for byte.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& argv,
                    const nlohmann::json& effective_scenario,
                    const nlohmann::json& settings,
                    const std::vector<std::string>& outputs, double wall_seconds);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool with_fit_line = false;
  double fit_slope = 0.0;
  double fit_intercept = 0.0;  // natural-log intercept, as fit_rate reports
};

/// Log-log scatter with optional fitted lines; no plotting dependency.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series);

void ensure_directory(const std::string& path);

}  // namespace crossdiff
