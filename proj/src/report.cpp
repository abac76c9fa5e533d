#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cdkf/bench.hpp"
#include "cdkf/error.hpp"

namespace cdkf {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_results_csv(const std::vector<RunResult>& results, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << kResultsCsvHeader << '\n' << std::setprecision(17);
  for (const RunResult& r : results) {
    out << r.experiment << ',' << r.filter << ',' << r.variant << ',' << r.delta_s << ','
        << r.delta_ill << ',' << r.runs << ',' << r.seed << ',' << r.tol << ',' << r.armse_p << ','
        << r.armse_v << ',' << (r.failed ? 1 : 0) << ',' << r.cpu_s << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::vector<RunResult> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader) {
    throw Error(ErrorKind::Io, "'" + path.string() + "' lacks the results header");
  }
  std::vector<RunResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 12) throw Error(ErrorKind::Io, "malformed row in '" + path.string() + "'");
    try {
      RunResult r;
      r.experiment = c[0];
      r.filter = c[1];
      r.variant = c[2];
      r.delta_s = std::stod(c[3]);
      r.delta_ill = std::stod(c[4]);
      r.runs = std::stoi(c[5]);
      r.seed = std::stoull(c[6]);
      r.tol = std::stod(c[7]);
      r.armse_p = std::stod(c[8]);
      r.armse_v = std::stod(c[9]);
      r.failed = c[10] == "1";
      r.cpu_s = std::stod(c[11]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Io, "unparsable value in '" + path.string() + "': " + line);
    }
  }
  return out;
}

std::string render_sweep_svg(const std::vector<RunResult>& results, SweepAxis axis,
                             const std::string& title) {
  constexpr double width = 720, height = 440;
  constexpr double left = 70, right = 200, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const bool log_x = axis == SweepAxis::IllConditioning;

  auto xval = [&](const RunResult& r) {
    return log_x ? std::log10(r.delta_ill) : r.delta_s;
  };

  std::vector<std::string> labels;
  std::map<std::string, std::vector<const RunResult*>> series;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const RunResult& r : results) {
    if (!series.contains(r.label())) labels.push_back(r.label());
    series[r.label()].push_back(&r);
    xmin = std::min(xmin, xval(r));
    xmax = std::max(xmax, xval(r));
    if (std::isfinite(r.armse_p) && r.armse_p > 0.0) {
      ymin = std::min(ymin, std::log10(r.armse_p));
      ymax = std::max(ymax, std::log10(r.armse_p));
    }
  }
  if (xmin > xmax) { xmin = 0; xmax = 1; }
  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  if (ymin > ymax) { ymin = 0; ymax = 1; }
  ymin = std::floor(ymin);
  ymax = std::max(std::ceil(ymax), ymin + 1);

  // δ decreases to the right, as in a robustness plot.
  auto px = [&](double x) {
    const double u = (x - xmin) / (xmax - xmin);
    return left + (log_x ? 1.0 - u : u) * plot_w;
  };
  auto py = [&](double ylog) { return top + (1.0 - (ylog - ymin) / (ymax - ymin)) * plot_h; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream svg;
  svg << std::setprecision(6);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << xml_escape(title)
      << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double y = ymin; y <= ymax + 1e-9; y += 1.0) {
    svg << "<line x1=\"" << left << "\" y1=\"" << py(y) << "\" x2=\"" << left + plot_w << "\" y2=\""
        << py(y) << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << py(y) + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e" << y
        << "</text>\n";
  }
  for (const auto& [label, pts] : series) {
    for (const RunResult* r : pts) {
      const double x = px(xval(*r));
      svg << "<text x=\"" << x << "\" y=\"" << top + plot_h + 16
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
          << (log_x ? "1e" + std::to_string(static_cast<int>(std::lround(xval(*r))))
                    : std::to_string(static_cast<int>(std::lround(r->delta_s))))
          << "</text>\n";
    }
    break;
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 18
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
      << (log_x ? "ill-conditioning delta" : "sampling period (s)") << "</text>\n"
      << "<text x=\"18\" y=\"" << top + plot_h / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\">ARMSE position (m)</text>\n";

  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& pts = series[labels[i]];
    const char* color = colors[i % std::size(colors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const RunResult* r : pts) {
      if (!std::isfinite(r->armse_p) || r->armse_p <= 0.0 || r->failed) continue;
      svg << px(xval(*r)) << ',' << py(std::log10(r->armse_p)) << ' ';
    }
    svg << "\"/>\n";
    for (const RunResult* r : pts) {
      if (!r->failed) continue;
      const double x = px(xval(*r));
      const double y = top + plot_h - 8 - 6.0 * static_cast<double>(i);
      svg << "<path d=\"M" << x - 4 << ',' << y - 4 << " L" << x + 4 << ',' << y + 4 << " M"
          << x - 4 << ',' << y + 4 << " L" << x + 4 << ',' << y - 4 << "\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
      break;
    }
    const double ly = top + 16 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << left + plot_w + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(labels[i]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_sweep_svg(const std::vector<RunResult>& results, SweepAxis axis, const std::string& title,
                     const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << render_sweep_svg(results, axis, title);
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void write_config_manifest(const ExperimentConfig& cfg, const std::string& command,
                           const std::vector<double>& sweep_values,
                           const std::filesystem::path& path) {
  nlohmann::json filters = nlohmann::json::array();
  for (const FilterSpec& f : cfg.filters) filters.push_back(f.label());
  const nlohmann::json manifest = {
      {"command", command},
      {"experiment", std::string(to_string(cfg.experiment))},
      {"delta_s", cfg.delta_s},
      {"ill_delta", cfg.ill_delta},
      {"runs", cfg.runs},
      {"seed", cfg.seed},
      {"tol", cfg.tol},
      {"em_step_s", cfg.em_step_s},
      {"horizon_s", cfg.horizon_s},
      {"filters", filters},
      {"sweep_values", sweep_values},
      {"workers", worker_count()},
  };
  std::ofstream out = open_out(path);
  out << std::setprecision(17) << manifest.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

}  // namespace cdkf
