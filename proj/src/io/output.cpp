#include "smoothsaa/io/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace smoothsaa::io {

namespace {

const char* const kPalette[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#00798c"};

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

struct Panel {
  double x0, y0, width, height;
};

// One panel of the SVG: metric against mean bandwidth.
void draw_panel(std::ostringstream& svg, const Panel& p, const std::string& title, const ExperimentResult& result,
                Metric metric) {
  auto value_of = [metric](const EstimatorStats& s) { return metric == Metric::Bias ? s.bias : s.variance; };
  std::map<Eigen::Index, std::vector<const EstimatorStats*>> curves;
  std::map<Eigen::Index, double> saa;
  std::vector<Eigen::Index> order;
  double xmax = 0.0;
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (const auto& s : result.stats) {
    if (!curves.count(s.n) && !saa.count(s.n)) order.push_back(s.n);
    if (s.kernel == "none") {
      saa[s.n] = value_of(s);
    } else {
      curves[s.n].push_back(&s);
      xmax = std::max(xmax, s.h_mean);
    }
    ymin = std::min(ymin, value_of(s));
    ymax = std::max(ymax, value_of(s));
  }
  if (xmax <= 0.0) xmax = 1.0;
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double h) { return p.x0 + 50.0 + (p.width - 60.0) * h / xmax; };
  auto sy = [&](double v) { return p.y0 + 30.0 + (p.height - 60.0) * (ymax - v) / (ymax - ymin); };

  svg << "<g>\n";
  svg << "<text x=\"" << coord(p.x0 + p.width / 2) << "\" y=\"" << coord(p.y0 + 18) << "\" text-anchor=\"middle\">"
      << xml_escape(title) << "</text>\n";
  svg << "<line x1=\"" << coord(sx(0)) << "\" y1=\"" << coord(sy(ymin)) << "\" x2=\"" << coord(sx(xmax)) << "\" y2=\""
      << coord(sy(ymin)) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << coord(sx(0)) << "\" y1=\"" << coord(sy(ymin)) << "\" x2=\"" << coord(sx(0)) << "\" y2=\""
      << coord(sy(ymax)) << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << coord(sx(xmax)) << "\" y=\"" << coord(sy(ymin) + 16) << "\" text-anchor=\"end\">h</text>\n";
  svg << "<text x=\"" << coord(sx(0) - 4) << "\" y=\"" << coord(sy(ymax)) << "\" text-anchor=\"end\">"
      << format4(ymax) << "</text>\n";
  svg << "<text x=\"" << coord(sx(0) - 4) << "\" y=\"" << coord(sy(ymin)) << "\" text-anchor=\"end\">"
      << format4(ymin) << "</text>\n";

  std::size_t color = 0;
  for (Eigen::Index n : order) {
    const char* stroke = kPalette[color++ % (sizeof kPalette / sizeof kPalette[0])];
    auto points = curves[n];
    std::stable_sort(points.begin(), points.end(),
                     [](const EstimatorStats* a, const EstimatorStats* b) { return a->h_mean < b->h_mean; });
    if (!points.empty()) {
      svg << "<polyline data-n=\"" << n << "\" fill=\"none\" stroke=\"" << stroke << "\" points=\"";
      for (std::size_t i = 0; i < points.size(); ++i) {
        svg << (i ? " " : "") << coord(sx(points[i]->h_mean)) << "," << coord(sy(value_of(*points[i])));
      }
      svg << "\"/>\n";
    }
    if (saa.count(n)) {
      svg << "<line data-n=\"" << n << "\" class=\"saa\" x1=\"" << coord(sx(0)) << "\" y1=\"" << coord(sy(saa[n]))
          << "\" x2=\"" << coord(sx(xmax)) << "\" y2=\"" << coord(sy(saa[n])) << "\" stroke=\"" << stroke
          << "\" stroke-dasharray=\"4 3\"/>\n";
    }
  }
  double ly = p.y0 + 40.0;
  color = 0;
  for (Eigen::Index n : order) {
    const char* stroke = kPalette[color++ % (sizeof kPalette / sizeof kPalette[0])];
    svg << "<text x=\"" << coord(p.x0 + p.width - 10) << "\" y=\"" << coord(ly) << "\" text-anchor=\"end\" fill=\""
        << stroke << "\">N=" << n << "</text>\n";
    ly += 16.0;
  }
  svg << "</g>\n";
}

}  // namespace

std::string format4(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  std::string out = buf;
  if (out == "-0.0000") out = "0.0000";
  return out;
}

std::string format_full(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::vector<std::vector<std::string>> OutputTable::formatted() const {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(raw.rows()));
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(format4(raw(i, j)));
  }
  return out;
}

OutputTable pivot(const std::vector<EstimatorStats>& stats, Metric metric) {
  OutputTable t;
  t.caption = metric == Metric::Bias ? "Bias" : "Variance";
  for (const auto& s : stats) {
    if (std::find(t.columns.begin(), t.columns.end(), s.label) == t.columns.end()) t.columns.push_back(s.label);
    if (std::find(t.row_keys.begin(), t.row_keys.end(), s.n) == t.row_keys.end()) t.row_keys.push_back(s.n);
  }
  t.raw = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(t.row_keys.size()),
                                    static_cast<Eigen::Index>(t.columns.size()),
                                    std::numeric_limits<double>::quiet_NaN());
  for (const auto& s : stats) {
    const auto i = std::find(t.row_keys.begin(), t.row_keys.end(), s.n) - t.row_keys.begin();
    const auto j = std::find(t.columns.begin(), t.columns.end(), s.label) - t.columns.begin();
    t.raw(i, j) = metric == Metric::Bias ? s.bias : s.variance;
  }
  return t;
}

std::string stats_csv(const std::vector<EstimatorStats>& stats) {
  std::ostringstream out;
  out << "N,estimator,kernel,h_rule,h_value,bias,variance,mse,stderr\n";
  for (const auto& s : stats) {
    out << s.n << "," << csv_field(s.label) << "," << csv_field(s.kernel) << "," << csv_field(s.rule) << ","
        << format_full(s.h_mean) << "," << format_full(s.bias) << "," << format_full(s.variance) << ","
        << format_full(s.mse) << "," << format_full(s.stderr_bias) << "\n";
  }
  return out.str();
}

std::string table_csv(const OutputTable& table) {
  std::ostringstream out;
  out << "N";
  for (const auto& c : table.columns) out << "," << csv_field(c);
  out << "\n";
  for (Eigen::Index i = 0; i < table.raw.rows(); ++i) {
    out << table.row_keys[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < table.raw.cols(); ++j) out << "," << format_full(table.raw(i, j));
    out << "\n";
  }
  return out.str();
}

std::string table_markdown(const OutputTable& table) {
  std::ostringstream out;
  out << "| N |";
  for (const auto& c : table.columns) out << " " << c << " |";
  out << "\n|---|";
  for (std::size_t j = 0; j < table.columns.size(); ++j) out << "---:|";
  out << "\n";
  const auto cells = table.formatted();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out << "| " << table.row_keys[i] << " |";
    for (const auto& c : cells[i]) out << " " << c << " |";
    out << "\n";
  }
  return out.str();
}

std::string report_markdown(const ExperimentResult& result, const std::string& title) {
  std::ostringstream out;
  out << "# " << title << "\n\n";
  out << "True value: " << format4(result.truth) << "\n\n";
  out << "## Bias\n\n" << table_markdown(pivot(result.stats, Metric::Bias)) << "\n";
  out << "## Variance\n\n" << table_markdown(pivot(result.stats, Metric::Variance)) << "\n";
  out << "## All statistics\n\n";
  out << "| N | estimator | kernel | h rule | h | bias | variance | MSE | std. err. |\n";
  out << "|---|---|---|---|---:|---:|---:|---:|---:|\n";
  for (const auto& s : result.stats) {
    out << "| " << s.n << " | " << s.label << " | " << s.kernel << " | " << s.rule << " | " << format4(s.h_mean)
        << " | " << format4(s.bias) << " | " << format4(s.variance) << " | " << format4(s.mse) << " | "
        << format4(s.stderr_bias) << " |\n";
  }
  return out.str();
}

std::string svg_plot(const ExperimentResult& result, const std::string& title) {
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"380\" viewBox=\"0 0 1000 380\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<title>" << xml_escape(title) << "</title>\n";
  svg << "<rect width=\"1000\" height=\"380\" fill=\"white\"/>\n";
  draw_panel(svg, {0.0, 10.0, 500.0, 360.0}, "Bias vs h", result, Metric::Bias);
  draw_panel(svg, {500.0, 10.0, 500.0, 360.0}, "Variance vs h", result, Metric::Variance);
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> emit_outputs(const ExperimentResult& result, const OutputSpec& spec, bool pivot_csv) {
  validate_formats(spec.formats);
  const std::filesystem::path dir(spec.dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::string> written;
  auto emit = [&](const std::string& file, const std::string& content) {
    const auto path = dir / file;
    write_file(path, content);
    written.push_back(path.string());
  };
  const auto has = [&](const char* f) { return std::find(spec.formats.begin(), spec.formats.end(), f) != spec.formats.end(); };
  if (has("csv")) {
    emit(spec.name + ".csv", stats_csv(result.stats));
    if (pivot_csv) {
      emit(spec.name + "_bias.csv", table_csv(pivot(result.stats, Metric::Bias)));
      emit(spec.name + "_variance.csv", table_csv(pivot(result.stats, Metric::Variance)));
    }
  }
  if (has("md")) emit(spec.name + ".md", report_markdown(result, spec.name));
  if (has("svg")) emit(spec.name + ".svg", svg_plot(result, spec.name));
  return written;
}

}  // namespace smoothsaa::io
