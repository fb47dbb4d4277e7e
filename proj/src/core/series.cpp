#include "diffcal/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diffcal/error.hpp"

namespace diffcal {

namespace {
// Relative slack when mapping times onto the sample grid.
constexpr double kGridEps = 1e-9;
}  // namespace

IndexRange TimeSeries::range(double t0, double t1, bool include_end) const {
  if (values.empty() || t1 < t0) return {};
  const double n = static_cast<double>(values.size());
  double lo = std::ceil((t0 - start) / period - kGridEps);
  double hi = include_end ? std::floor((t1 - start) / period + kGridEps) + 1.0
                          : std::ceil((t1 - start) / period - kGridEps);
  lo = std::clamp(lo, 0.0, n);
  hi = std::clamp(hi, 0.0, n);
  if (hi <= lo) return {};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

bool TimeSeries::covers(double t0, double t1) const noexcept {
  if (values.empty()) return false;
  const double slack = kGridEps * std::max(1.0, std::abs(period));
  return t0 >= start - slack * period && t1 <= end_time() + slack * period;
}

double TimeSeries::mean(IndexRange r) const {
  if (r.empty() || r.last > values.size()) {
    throw Error(ErrorCode::invalid_argument, "mean over empty sample range");
  }
  const double sum = std::accumulate(values.begin() + r.first,
                                     values.begin() + r.last, 0.0);
  return sum / static_cast<double>(r.size());
}

TimeSeries TimeSeries::slice(IndexRange r) const {
  TimeSeries out;
  out.period = period;
  out.start = time_at(r.first);
  out.values.assign(values.begin() + r.first, values.begin() + r.last);
  return out;
}

std::vector<double> moving_average(const std::vector<double>& x,
                                   std::size_t width) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  width = std::max<std::size_t>(width, 1);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  const std::size_t left = (width - 1) / 2;
  const std::size_t right = width - 1 - left;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n - 1, i + right);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi + 1 - lo);
  }
  return out;
}

double mean_of(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) /
         static_cast<double>(x.size());
}

double stdev_of(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double median_of(std::vector<double> x) {
  if (x.empty()) return 0.0;
  const std::size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + mid, x.end());
  double m = x[mid];
  if (x.size() % 2 == 0) {
    const double lower = *std::max_element(x.begin(), x.begin() + mid);
    m = 0.5 * (m + lower);
  }
  return m;
}

}  // namespace diffcal
