#include "diffcal/signal/steady_state.hpp"

#include <cmath>
#include <vector>

#include "diffcal/error.hpp"

namespace diffcal::signal {

void SteadyStateCriterion::validate() const {
  if (!(window > 0.0) || !(slope_threshold > 0.0) || hold < 1) {
    throw Error(ErrorCode::invalid_argument,
                "steady-state criterion needs window > 0, threshold > 0, "
                "hold >= 1");
  }
}

double window_slope(const TimeSeries& series, std::size_t first,
                    std::size_t count) {
  if (count < 2 || first + count > series.size()) {
    throw Error(ErrorCode::invalid_argument, "slope window out of range");
  }
  const double mid = 0.5 * static_cast<double>(count - 1);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double x = static_cast<double>(k) - mid;
    sxy += x * series.values[first + k];
    sxx += x * x;
  }
  return sxy / sxx / series.period;
}

std::optional<double> detect_steady_state(
    const TimeSeries& diff, const SteadyStateCriterion& criterion) {
  criterion.validate();
  const auto w = static_cast<std::size_t>(
      std::llround(criterion.window / diff.period));
  const auto hold = static_cast<std::size_t>(criterion.hold);
  const std::size_t n = diff.size();
  if (w < 2 || n < hold * w) return std::nullopt;

  // Sliding least-squares slope from prefix sums of y and k*y, with values
  // shifted by y[0] to keep the sums small.
  const double y0 = diff.values.front();
  std::vector<double> sy(n + 1, 0.0);
  std::vector<double> sky(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double y = diff.values[k] - y0;
    sy[k + 1] = sy[k] + y;
    sky[k + 1] = sky[k] + static_cast<double>(k) * y;
  }
  const double wd = static_cast<double>(w);
  const double sxx = wd * (wd * wd - 1.0) / 12.0;
  const double threshold = criterion.slope_threshold / 60.0;  // °C/s

  const std::size_t starts = n - w + 1;
  std::vector<char> flat(starts, 0);
  for (std::size_t s = 0; s < starts; ++s) {
    const double sum_y = sy[s + w] - sy[s];
    const double sum_ky = sky[s + w] - sky[s];
    // sum over window of (k - s - mid) * y
    const double mid = static_cast<double>(s) + 0.5 * (wd - 1.0);
    const double slope = (sum_ky - mid * sum_y) / sxx / diff.period;
    flat[s] = std::abs(slope) < threshold;
  }

  for (std::size_t s = 0; s + hold * w <= n; ++s) {
    bool ok = true;
    for (std::size_t h = 0; h < hold && ok; ++h) ok = flat[s + h * w] != 0;
    if (ok) return diff.time_at(s);
  }
  return std::nullopt;
}

}  // namespace diffcal::signal
