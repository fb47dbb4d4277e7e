#pragma once

#include <string>
#include <vector>

#include "diffcal/series.hpp"

namespace diffcal::signal {

struct Interval {
  double begin = 0.0;  // s
  double end = 0.0;    // s

  double length() const noexcept { return end - begin; }
};

struct DetectorOptions {
  Interval noise_window{0.0, 7200.0};
  double threshold_factor = 4.0;
  double smoothing = 60.0;       // s, moving-average length
  double merge_gap = 120.0;      // s
  double min_duration = 600.0;   // s
  double max_duration = 3600.0;  // s
};

struct FluctuationEvent {
  std::string channel;
  double start = 0.0;           // s
  double duration = 0.0;        // s
  double peak_time = 0.0;       // s
  double peak_amplitude = 0.0;  // °C, signed, from the smoothed residual
  int polarity = 0;             // +1 warming, -1 cooling
};

/// Robust noise level: 1.4826 * MAD of `smoothed` over the given samples.
double robust_sigma(const std::vector<double>& smoothed, IndexRange range);

/// Mesoscale excursions in a detrended residual.
///
/// The residual is smoothed with a `smoothing`-long moving average; sigma is
/// the robust noise level of the smoothed residual inside `noise_window`.
/// Events are maximal runs with |smoothed| > threshold_factor * sigma, merged
/// across gaps shorter than `merge_gap`, kept when their duration is within
/// [min_duration, max_duration].
std::vector<FluctuationEvent> detect_fluctuations(
    const TimeSeries& residual, const DetectorOptions& options,
    const std::string& channel = "diff");

/// RMS(residual over b) / RMS(residual over a). Windows must be disjoint,
/// inside the series and at least one hour long.
double fluctuation_growth(const TimeSeries& residual, Interval a, Interval b);

}  // namespace diffcal::signal
