#include "diffcal/trace.hpp"

#include <cmath>
#include <string>

#include "diffcal/error.hpp"

namespace diffcal {

std::string_view channel_name(Channel c) noexcept {
  switch (c) {
    case Channel::fluid_L: return "fluid_L";
    case Channel::fluid_R: return "fluid_R";
    case Channel::air_1: return "air_1";
    case Channel::air_2: return "air_2";
    case Channel::env: return "env";
  }
  return "?";
}

std::optional<Channel> parse_channel(std::string_view name) noexcept {
  for (Channel c : kChannelOrder) {
    if (channel_name(c) == name) return c;
  }
  return std::nullopt;
}

TimeSeries MultiChannelTrace::series(Channel c) const {
  return TimeSeries{start_time, sample_period, (*this)[c]};
}

TimeSeries MultiChannelTrace::differential() const {
  TimeSeries d{start_time, sample_period, {}};
  const auto& l = (*this)[Channel::fluid_L];
  const auto& r = (*this)[Channel::fluid_R];
  d.values.resize(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) d.values[i] = l[i] - r[i];
  return d;
}

void MultiChannelTrace::validate() const {
  if (!(sample_period > 0.0) || !std::isfinite(sample_period) ||
      !std::isfinite(start_time)) {
    throw Error(ErrorCode::malformed_trace,
                "trace sample period must be positive and finite");
  }
  const std::size_t n = channels[0].size();
  if (n < 2) {
    throw Error(ErrorCode::malformed_trace, "trace needs at least 2 samples");
  }
  for (Channel c : kChannelOrder) {
    const auto& v = (*this)[c];
    if (v.size() != n) {
      throw Error(ErrorCode::ragged_row,
                  "channel " + std::string(channel_name(c)) +
                      " length differs from fluid_L");
    }
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::non_finite,
                    "non-finite value in channel " +
                        std::string(channel_name(c)));
      }
    }
  }
}

}  // namespace diffcal
