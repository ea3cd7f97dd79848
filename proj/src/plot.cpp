#include "dagmarl/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dagmarl/episode_log.hpp"
#include "dagmarl/error.hpp"
#include "dagmarl/metrics.hpp"

namespace dagmarl {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  if (series.empty()) fail(ErrorCode::kEmptySeries, "nothing to plot");
  const double left = 70, right = 160, top = 40, bottom = 50;
  const double w = options.width - left - right;
  const double h = options.height - top - bottom;

  size_t longest = 1;
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const PlotSeries& s : series) {
    longest = std::max(longest, s.values.size());
    for (double y : s.values) {
      if (first) {
        lo = hi = y;
        first = false;
      }
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  }
  if (options.fixed_unit_range) {
    lo = 0.0;
    hi = 1.0;
  } else if (first || lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double x_span = std::max<double>(1.0, static_cast<double>(longest - 1));
  auto px = [&](double i) { return left + w * i / x_span; };
  auto py = [&](double y) { return top + h * (1.0 - (y - lo) / (hi - lo)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(left + w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape(options.title) << "</text>\n";
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + h) << "\" x2=\"" << num(left + w)
      << "\" y2=\"" << num(top + h) << "\"/>\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
      << "\" y2=\"" << num(top + h) << "\"/>\n</g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = lo + (hi - lo) * t / 4.0;
    svg << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(left)
        << "\" y2=\"" << num(py(y)) << "\" stroke=\"black\"/>"
        << "<text class=\"ytick\" x=\"" << num(left - 6) << "\" y=\"" << num(py(y) + 4)
        << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
    const double xi = x_span * t / 4.0;
    svg << "<line x1=\"" << num(px(xi)) << "\" y1=\"" << num(top + h) << "\" x2=\"" << num(px(xi))
        << "\" y2=\"" << num(top + h + 4) << "\" stroke=\"black\"/>"
        << "<text class=\"xtick\" x=\"" << num(px(xi)) << "\" y=\"" << num(top + h + 18)
        << "\" text-anchor=\"middle\">" << tick_label(xi) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + w / 2) << "\" y=\"" << num(options.height - 10)
      << "\" text-anchor=\"middle\">episode</text>\n</g>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[k].values.size(); ++i) {
      svg << (i ? " " : "") << num(px(static_cast<double>(i))) << "," << num(py(series[k].values[i]));
    }
    svg << "\"/>\n";
  }
  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const double y = top + 10 + 18 * static_cast<double>(k);
    const double x = left + w + 15;
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 20)
        << "\" y2=\"" << num(y) << "\" stroke=\"" << kPalette[k % std::size(kPalette)]
        << "\" stroke-width=\"2\"/><text x=\"" << num(x + 26) << "\" y=\"" << num(y + 4) << "\">"
        << escape(series[k].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void plot_episode_csvs(const std::vector<std::string>& csv_paths, const std::string& svg_path,
                       const CurveOptions& options) {
  if (csv_paths.empty()) fail(ErrorCode::kInvalidArgument, "plot needs at least one CSV");
  std::vector<PlotSeries> series;
  for (const std::string& path : csv_paths) {
    const EpisodeTable table = read_episode_csv(path);
    std::vector<double> y = team_rewards(table);
    if (y.empty()) fail(ErrorCode::kSchemaMismatch, path + ": no episode rows");
    y = moving_average(y, options.window);
    if (options.normalize) y = min_max_normalize(y);
    // Run directories all hold an episodes.csv; label those by directory.
    const std::filesystem::path file(path);
    std::string label = file.stem().string();
    if (label == "episodes" && file.has_parent_path()) label = file.parent_path().filename().string();
    series.push_back({label, std::move(y)});
  }
  PlotOptions plot;
  plot.title = options.title;
  plot.fixed_unit_range = options.normalize;
  const std::string svg = render_svg(series, plot);
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write '" + svg_path + "'");
  out << svg;
}

}  // namespace dagmarl
