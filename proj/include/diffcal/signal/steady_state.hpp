#pragma once

#include <optional>

#include "diffcal/series.hpp"

namespace diffcal::signal {

/// "Flat" differential: the least-squares slope over each of `hold`
/// back-to-back windows stays below the threshold.
struct SteadyStateCriterion {
  double window = 600.0;           // s
  double slope_threshold = 1e-5;   // °C/min
  int hold = 3;

  void validate() const;
};

/// Least-squares slope (°C/s) of samples [first, first + count).
double window_slope(const TimeSeries& series, std::size_t first,
                    std::size_t count);

/// Earliest sample time t such that the windows [t, t+W), [t+W, t+2W), ...
/// (`hold` of them) all have |slope| < threshold; nullopt when no such t
/// exists or the series is shorter than hold * window.
std::optional<double> detect_steady_state(const TimeSeries& diff,
                                          const SteadyStateCriterion& criterion);

}  // namespace diffcal::signal
