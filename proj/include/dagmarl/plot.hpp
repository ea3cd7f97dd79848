#ifndef DAGMARL_PLOT_HPP_
#define DAGMARL_PLOT_HPP_

#include <string>
#include <vector>

namespace dagmarl {

struct PlotSeries {
  std::string label;
  std::vector<double> values;  // y per episode, x = index
};

struct PlotOptions {
  std::string title = "team reward";
  int width = 800;
  int height = 480;
  // Fixed y range, e.g. [0, 1] for normalized curves; otherwise derived
  // from the data.
  bool fixed_unit_range = false;
};

// Deterministic SVG: axes with five ticks each, one polyline and one
// legend entry per series.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options = {});

struct CurveOptions {
  int window = 100;
  bool normalize = false;
  std::string title = "team reward";
};

// Reads episode CSVs (schemas must agree on the team-reward column),
// smooths each team-reward series, optionally min-max normalizes it, and
// writes the SVG. Labels are the file stems, or the directory name for
// files called episodes.csv.
void plot_episode_csvs(const std::vector<std::string>& csv_paths, const std::string& svg_path,
                       const CurveOptions& options = {});

}  // namespace dagmarl

#endif  // DAGMARL_PLOT_HPP_
