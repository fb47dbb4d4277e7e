#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "diffcal/series.hpp"

namespace diffcal {

/// Sensor channels in file/column order.
enum class Channel : std::size_t { fluid_L = 0, fluid_R, air_1, air_2, env };

inline constexpr std::size_t kChannelCount = 5;
inline constexpr std::array<Channel, kChannelCount> kChannelOrder = {
    Channel::fluid_L, Channel::fluid_R, Channel::air_1, Channel::air_2,
    Channel::env};

std::string_view channel_name(Channel c) noexcept;
std::optional<Channel> parse_channel(std::string_view name) noexcept;

/// Five-channel temperature record (°C), uniformly sampled.
struct MultiChannelTrace {
  double sample_period = 1.0;
  double start_time = 0.0;
  std::array<std::vector<double>, kChannelCount> channels;

  std::size_t size() const noexcept { return channels[0].size(); }
  double time_at(std::size_t i) const noexcept {
    return start_time + static_cast<double>(i) * sample_period;
  }

  std::vector<double>& operator[](Channel c) {
    return channels[static_cast<std::size_t>(c)];
  }
  const std::vector<double>& operator[](Channel c) const {
    return channels[static_cast<std::size_t>(c)];
  }

  TimeSeries series(Channel c) const;
  /// fluid_L - fluid_R.
  TimeSeries differential() const;

  /// Throws Error unless every channel has the same length >= 2, all values
  /// are finite and the sample period is positive.
  void validate() const;
};

}  // namespace diffcal
