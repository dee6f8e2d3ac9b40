#include "crossdiff/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace crossdiff {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file " + path);
  return os;
}

}  // namespace

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path);
}

void write_csv(const std::string& path, const CsvTable& table) {
  auto os = open_out(path);
  for (size_t i = 0; i < table.header.size(); ++i)
    os << (i ? "," : "") << table.header[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
}

void write_columns_csv(const std::string& path,
                       const std::vector<std::string>& names,
                       const std::vector<const Array*>& columns) {
  auto os = open_out(path);
  for (size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
  os << "\n";
  const Eigen::Index n = columns.empty() ? 0 : columns.front()->size();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (size_t c = 0; c < columns.size(); ++c)
      os << (c ? "," : "") << format_double((*columns[c])[r]);
    os << "\n";
  }
}

void write_monitor_csv(const std::string& path, const MonitorLog& log,
                       bool fast_columns) {
  auto os = open_out(path);
  os << "t,mass_l1,v_linf";
  if (fast_columns) {
    os << ",q_l2,manifold_dist,i2_fast";
    for (double p : log.energy_p) os << ",E_" << format_double(p);
  } else {
    os << ",grad_u_l2";
  }
  os << ",mass_bound_violated,v_bound_violated\n";
  for (const auto& s : log.samples) {
    os << format_double(s.t) << "," << format_double(s.mass_l1) << ","
       << format_double(s.v_linf);
    if (fast_columns) {
      os << "," << format_double(s.q_l2) << "," << format_double(s.manifold_dist)
         << "," << format_double(s.i2_fast);
      for (double e : s.energies) os << "," << format_double(e);
    } else {
      os << "," << format_double(s.grad_u_l2);
    }
    os << "," << (s.mass_bound_violated ? 1 : 0) << ","
       << (s.v_bound_violated ? 1 : 0) << "\n";
  }
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& argv,
                    const nlohmann::json& effective_scenario,
                    const nlohmann::json& settings,
                    const std::vector<std::string>& outputs,
                    double wall_seconds) {
  nlohmann::json m;
  m["command"] = command;
  m["argv"] = argv;
  m["scenario"] = effective_scenario;
  m["settings"] = settings;
  m["outputs"] = outputs;
  m["wall_seconds"] = wall_seconds;
  m["versions"] = {{"crossdiff", "0.1.0"}, {"compiler", __VERSION__}};
  auto os = open_out(path);
  os << m.dump(2) << "\n";
}

namespace {

struct AxisMap {
  double lo, hi;       // log10 data range
  double px0, px1;     // pixel range
  double operator()(double v) const {
    const double t = (std::log10(v) - lo) / (hi - lo);
    return px0 + t * (px1 - px0);
  }
};

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) {
      if (v > 0.0) {
        xmin = std::min(xmin, std::log10(v));
        xmax = std::max(xmax, std::log10(v));
      }
    }
    for (double v : s.y) {
      if (v > 0.0) {
        ymin = std::min(ymin, std::log10(v));
        ymax = std::max(ymax, std::log10(v));
      }
    }
  }
  if (xmin > xmax || ymin > ymax) {
    xmin = ymin = -1.0;
    xmax = ymax = 1.0;
  }
  const double padx = 0.05 * std::max(xmax - xmin, 1e-3);
  const double pady = 0.05 * std::max(ymax - ymin, 1e-3);
  const int w = 640, hgt = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  const AxisMap X{xmin - padx, xmax + padx, double(ml), double(w - mr)};
  const AxisMap Y{ymin - pady, ymax + pady, double(hgt - mb), double(mt)};

  auto os = open_out(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << hgt << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
     << "</text>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << hgt - 10
     << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  os << "<text x=\"15\" y=\"" << hgt / 2 << "\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 15 " << hgt / 2 << ")\">" << ylabel
     << "</text>\n";
  // frame and decade ticks
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr
     << "\" height=\"" << hgt - mt - mb
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = (int)std::ceil(xmin - padx); d <= (int)std::floor(xmax + padx); ++d) {
    const double px = X(std::pow(10.0, d));
    os << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px
       << "\" y2=\"" << hgt - mb << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << px << "\" y=\"" << hgt - mb + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">1e" << d << "</text>\n";
  }
  for (int d = (int)std::ceil(ymin - pady); d <= (int)std::floor(ymax + pady); ++d) {
    const double py = Y(std::pow(10.0, d));
    os << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << w - mr
       << "\" y2=\"" << py << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py + 4
       << "\" text-anchor=\"end\" font-size=\"11\">1e" << d << "</text>\n";
  }
  const char* colors[] = {"#1f6fb4", "#d45500", "#2e8b57", "#8b008b", "#b22222"};
  int ci = 0;
  for (const auto& s : series) {
    const char* col = colors[ci % 5];
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] > 0.0 && s.y[i] > 0.0)
        os << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i])
           << "\" r=\"3.5\" fill=\"" << col << "\"/>\n";
    }
    if (s.with_fit_line && !s.x.empty()) {
      double x0 = 1e300, x1 = -1e300;
      for (double v : s.x)
        if (v > 0.0) {
          x0 = std::min(x0, v);
          x1 = std::max(x1, v);
        }
      const double y0 = std::exp(s.fit_intercept + s.fit_slope * std::log(x0));
      const double y1 = std::exp(s.fit_intercept + s.fit_slope * std::log(x1));
      os << "<line x1=\"" << X(x0) << "\" y1=\"" << Y(y0) << "\" x2=\"" << X(x1)
         << "\" y2=\"" << Y(y1) << "\" stroke=\"" << col
         << "\" stroke-dasharray=\"5,3\"/>\n";
    }
    os << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 16 + 16 * ci
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << col << "\">"
       << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace crossdiff
