#include "diffcal/signal/fluctuations.hpp"

#include <algorithm>
#include <cmath>

#include "diffcal/error.hpp"

namespace diffcal::signal {

namespace {

constexpr double kMadToSigma = 1.4826;

struct Run {
  std::size_t first;
  std::size_t last;  // inclusive
};

}  // namespace

double robust_sigma(const std::vector<double>& smoothed, IndexRange range) {
  std::vector<double> window(smoothed.begin() + range.first,
                             smoothed.begin() + range.last);
  const double med = median_of(window);
  for (double& v : window) v = std::abs(v - med);
  return kMadToSigma * median_of(std::move(window));
}

std::vector<FluctuationEvent> detect_fluctuations(
    const TimeSeries& residual, const DetectorOptions& options,
    const std::string& channel) {
  if (!(options.smoothing > 0.0) || !(options.threshold_factor > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "smoothing and threshold_factor must be positive");
  }
  if (options.noise_window.length() < 10.0 * options.smoothing) {
    throw Error(ErrorCode::degenerate_window,
                "noise window must span at least 10 smoothing lengths");
  }
  if (!residual.covers(options.noise_window.begin, options.noise_window.end)) {
    throw Error(ErrorCode::degenerate_window,
                "noise window lies outside the residual series");
  }

  const auto width = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(options.smoothing / residual.period)));
  const std::vector<double> smooth = moving_average(residual.values, width);
  const IndexRange noise =
      residual.range(options.noise_window.begin, options.noise_window.end);
  const double threshold =
      options.threshold_factor * robust_sigma(smooth, noise);

  std::vector<Run> runs;
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    if (!(std::abs(smooth[i]) > threshold)) continue;
    if (!runs.empty() && runs.back().last + 1 == i) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i});
    }
  }

  const double gap_samples = options.merge_gap / residual.period;
  std::vector<Run> merged;
  for (const Run& r : runs) {
    if (!merged.empty() &&
        static_cast<double>(r.first - merged.back().last - 1) < gap_samples) {
      merged.back().last = r.last;
    } else {
      merged.push_back(r);
    }
  }

  std::vector<FluctuationEvent> events;
  for (const Run& r : merged) {
    const double duration =
        static_cast<double>(r.last - r.first + 1) * residual.period;
    if (duration < options.min_duration || duration > options.max_duration) {
      continue;
    }
    std::size_t peak = r.first;
    for (std::size_t i = r.first; i <= r.last; ++i) {
      if (std::abs(smooth[i]) > std::abs(smooth[peak])) peak = i;
    }
    FluctuationEvent e;
    e.channel = channel;
    e.start = residual.time_at(r.first);
    e.duration = duration;
    e.peak_time = residual.time_at(peak);
    e.peak_amplitude = smooth[peak];
    e.polarity = smooth[peak] >= 0.0 ? 1 : -1;
    events.push_back(e);
  }
  return events;
}

double fluctuation_growth(const TimeSeries& residual, Interval a, Interval b) {
  constexpr double kMinWindow = 3600.0;
  if (a.length() < kMinWindow || b.length() < kMinWindow) {
    throw Error(ErrorCode::degenerate_window,
                "growth windows must each be at least 1 h long");
  }
  if (a.begin < b.end && b.begin < a.end) {
    throw Error(ErrorCode::degenerate_window, "growth windows overlap");
  }
  if (!residual.covers(a.begin, a.end) || !residual.covers(b.begin, b.end)) {
    throw Error(ErrorCode::degenerate_window,
                "growth window lies outside the series");
  }
  auto rms = [&](Interval w) {
    const IndexRange r = residual.range(w.begin, w.end);
    double ss = 0.0;
    for (std::size_t i = r.first; i < r.last; ++i) {
      ss += residual.values[i] * residual.values[i];
    }
    return std::sqrt(ss / static_cast<double>(r.size()));
  };
  const double ra = rms(a);
  if (ra == 0.0) {
    throw Error(ErrorCode::degenerate_window,
                "reference window has zero RMS (degenerate ratio)");
  }
  return rms(b) / ra;
}

}  // namespace diffcal::signal
