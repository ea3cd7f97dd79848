#include "dagmarl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dagmarl/error.hpp"

namespace dagmarl {

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (series.empty()) fail(ErrorCode::kEmptySeries, "moving average of an empty series");
  if (window < 1) fail(ErrorCode::kInvalidArgument, "moving-average window must be >= 1");
  std::vector<double> out(series.size());
  // Summed directly per point: a running sum would drift in the last bits.
  for (size_t i = 0; i < series.size(); ++i) {
    const size_t first = i + 1 >= static_cast<size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (size_t j = first; j <= i; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(i - first + 1);
  }
  return out;
}

std::vector<double> min_max_normalize(std::span<const double> series) {
  if (series.empty()) return {};
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  std::vector<double> out(series.size(), 0.5);
  if (*hi == *lo) return out;
  for (size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - *lo) / (*hi - *lo);
  return out;
}

double Histogram::bin_lower(int b) const {
  return lo + (hi - lo) * b / static_cast<double>(counts.size());
}

double Histogram::bin_upper(int b) const {
  return b + 1 == static_cast<int>(counts.size()) ? hi : bin_lower(b + 1);
}

Histogram histogram(std::span<const double> values, int bins) {
  if (values.empty()) fail(ErrorCode::kEmptySeries, "histogram of an empty sample");
  if (bins < 1) fail(ErrorCode::kInvalidArgument, "histogram needs at least one bin");
  Histogram h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.lo = *lo;
  h.hi = *hi;
  if (h.lo == h.hi) {
    h.counts = {static_cast<long>(values.size())};
    return h;
  }
  h.counts.assign(bins, 0);
  for (double x : values) {
    int b = static_cast<int>((x - h.lo) / (h.hi - h.lo) * bins);
    ++h.counts[std::clamp(b, 0, bins - 1)];
  }
  return h;
}

double mean(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::kEmptySeries, "mean of an empty sample");
  double s = 0.0;
  for (double x : values) s += x;
  return s / static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::kEmptySeries, "median of an empty sample");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.mean = mean(values);
  s.median = median({values.begin(), values.end()});
  double var = 0.0;
  for (double x : values) var += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

}  // namespace dagmarl
