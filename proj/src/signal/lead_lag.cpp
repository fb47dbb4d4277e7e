#include "diffcal/signal/lead_lag.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "diffcal/error.hpp"

namespace diffcal::signal {

namespace {

double pearson(const std::vector<double>& a, std::size_t a0,
               const std::vector<double>& b, std::size_t b0, std::size_t n) {
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ma += a[a0 + k];
    mb += b[b0 + k];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double da = a[a0 + k] - ma;
    const double db = b[b0 + k] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

std::vector<LagEstimate> lead_lag(const TimeSeries& env, const TimeSeries& diff,
                                  double max_lag,
                                  const LeadLagOptions& options) {
  const double tol = 1e-9 * std::max(1.0, std::abs(env.period));
  if (env.size() != diff.size() || std::abs(env.period - diff.period) > tol ||
      std::abs(env.start - diff.start) > tol * env.period) {
    throw Error(ErrorCode::invalid_argument,
                "env and diff must share one time base");
  }
  const double span = env.end_time() - env.start;
  if (!(max_lag > 0.0) || !(max_lag < span / 4.0)) {
    throw Error(ErrorCode::invalid_argument,
                "max_lag must be positive and below a quarter of the span");
  }

  const std::size_t n = env.size();
  const auto lag_n = static_cast<std::size_t>(std::llround(max_lag / env.period));
  const auto smooth_n = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(options.smoothing / env.period)));
  const std::vector<double> smooth = moving_average(env.values, smooth_n);

  // Sliding-window arg-min/arg-max over [i - lag_n, i + lag_n].
  std::vector<std::size_t> arg_max(n, 0);
  std::vector<std::size_t> arg_min(n, 0);
  {
    std::deque<std::size_t> dmax;
    std::deque<std::size_t> dmin;
    for (std::size_t j = 0; j < n; ++j) {
      while (!dmax.empty() && smooth[dmax.back()] < smooth[j]) dmax.pop_back();
      while (!dmin.empty() && smooth[dmin.back()] > smooth[j]) dmin.pop_back();
      dmax.push_back(j);
      dmin.push_back(j);
      if (j < 2 * lag_n) continue;
      const std::size_t lo = j - 2 * lag_n;
      while (dmax.front() < lo) dmax.pop_front();
      while (dmin.front() < lo) dmin.pop_front();
      arg_max[j - lag_n] = dmax.front();
      arg_min[j - lag_n] = dmin.front();
    }
  }

  std::vector<LagEstimate> out;
  const std::size_t half_window = 2 * lag_n;
  for (std::size_t i = lag_n; i + lag_n < n; ++i) {
    const double mx = smooth[arg_max[i]];
    const double mn = smooth[arg_min[i]];
    int kind = 0;
    // First index of a plateau wins.
    if (arg_max[i] == i && mx > mn) {
      kind = 1;
    } else if (arg_min[i] == i && mx > mn) {
      kind = -1;
    }
    if (kind == 0) continue;
    if (i < half_window + lag_n || i + half_window + lag_n >= n) continue;

    const std::size_t w0 = i - half_window;
    const std::size_t count = 2 * half_window + 1;
    LagEstimate best;
    best.peak_time = env.time_at(i);
    best.extremum = kind;
    best.correlation = -2.0;
    for (std::size_t k = 0; k <= 2 * lag_n; ++k) {
      // diff sample at t + lag pairs with env sample at t.
      const std::size_t d0 = w0 + k - lag_n;
      const double r = pearson(env.values, w0, diff.values, d0, count);
      if (r > best.correlation) {
        best.correlation = r;
        best.lag = (static_cast<double>(k) - static_cast<double>(lag_n)) *
                   env.period;
      }
    }
    best.reliable = best.correlation >= options.min_correlation;
    out.push_back(best);
  }
  if (out.empty()) {
    throw Error(ErrorCode::no_extrema,
                "no environmental extrema with a full correlation window");
  }
  return out;
}

}  // namespace diffcal::signal
