#ifndef DAGMARL_METRICS_HPP_
#define DAGMARL_METRICS_HPP_

#include <span>
#include <vector>

namespace dagmarl {

// out[i] = mean of series[max(0, i - window + 1) ..= i]. Throws
// kEmptySeries on an empty series, kInvalidArgument when window < 1.
std::vector<double> moving_average(std::span<const double> series, int window = 100);

// (x - min) / (max - min); a constant series maps to 0.5 everywhere.
std::vector<double> min_max_normalize(std::span<const double> series);

// Equal-width bins over [lo, hi]; the last bin is closed. A constant
// sample collapses to one bin at that value.
struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<long> counts;

  double bin_lower(int b) const;
  double bin_upper(int b) const;
};
Histogram histogram(std::span<const double> values, int bins = 30);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};
Summary summarize(std::span<const double> values);

double mean(std::span<const double> values);
double median(std::vector<double> values);

}  // namespace dagmarl

#endif  // DAGMARL_METRICS_HPP_
