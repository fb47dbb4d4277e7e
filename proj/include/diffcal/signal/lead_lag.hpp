#pragma once

#include <vector>

#include "diffcal/series.hpp"

namespace diffcal::signal {

struct LagEstimate {
  double peak_time = 0.0;    // s, environmental extremum
  int extremum = 0;          // +1 maximum, -1 minimum
  double lag = 0.0;          // s, positive: calorimeter lags environment
  double correlation = 0.0;  // Pearson, in [-1, 1]
  bool reliable = false;     // correlation >= min_correlation
};

struct LeadLagOptions {
  double smoothing = 3600.0;      // s, for locating extrema
  double min_correlation = 0.3;
};

/// Lag of `diff` relative to `env` around each environmental extremum.
///
/// Extrema are local maxima/minima of the smoothed environment that dominate
/// a +-max_lag neighbourhood. Around each, the Pearson correlation between
/// env over a 4*max_lag window and diff shifted by every lag in
/// [-max_lag, max_lag] is computed; the arg-max is reported. Extrema whose
/// shifted windows would leave the series are skipped.
std::vector<LagEstimate> lead_lag(const TimeSeries& env, const TimeSeries& diff,
                                  double max_lag,
                                  const LeadLagOptions& options = {});

}  // namespace diffcal::signal
