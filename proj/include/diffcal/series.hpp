#pragma once

#include <cstddef>
#include <vector>

namespace diffcal {

/// Half-open index range [first, last).
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const noexcept { return last > first ? last - first : 0; }
  bool empty() const noexcept { return size() == 0; }
};

/// Uniformly sampled scalar series; sample i sits at start + i * period.
struct TimeSeries {
  double start = 0.0;
  double period = 1.0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double time_at(std::size_t i) const noexcept {
    return start + static_cast<double>(i) * period;
  }
  double end_time() const noexcept {
    return values.empty() ? start : time_at(values.size() - 1);
  }

  /// Samples whose timestamps fall in [t0, t1) (or [t0, t1] when
  /// `include_end`), clipped to the series.
  IndexRange range(double t0, double t1, bool include_end = false) const;

  /// True when [t0, t1] lies inside the sampled span.
  bool covers(double t0, double t1) const noexcept;

  double mean(IndexRange r) const;

  TimeSeries slice(IndexRange r) const;
};

/// Centered moving average over `width` samples; windows are truncated at
/// the edges.
std::vector<double> moving_average(const std::vector<double>& x,
                                   std::size_t width);

double mean_of(const std::vector<double>& x);
double stdev_of(const std::vector<double>& x);  // sample (n-1) StDev
double median_of(std::vector<double> x);

}  // namespace diffcal
