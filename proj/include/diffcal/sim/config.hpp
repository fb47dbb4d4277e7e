#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "diffcal/trace.hpp"

namespace diffcal::sim {

/// Per-fluid-channel value pair; L is the experimental channel, R the control.
struct FluidPair {
  double L = 0.0;
  double R = 0.0;
};

enum class Mode { active, passive };

/// How heat leaving the chamber towards the samples is shared between them.
///
/// `equal_split`: the total flux sum_i (T_chamber - T_i) / R_i is delivered in
/// equal parts to both channels, so a heat-capacity difference shows up as a
/// persistent temperature differential. `per_channel`: each channel draws
/// (T_chamber - T_i) / R_i on its own and both relax to the chamber.
enum class HeatDistribution { equal_split, per_channel };

struct ThermostatStep {
  double time = 0.0;      // s
  double setpoint = 0.0;  // °C
};

struct ThermostatProfile {
  std::vector<ThermostatStep> steps{{0.0, 22.0}, {1800.0, 24.0}};
  double tracking_time_constant = 60.0;  // s
  double control_accuracy = 0.002;       // °C, bound on control noise
  double noise_correlation_time = 60.0;  // s

  void validate() const;
};

struct EnvironmentModel {
  double mean_temp = 21.0;            // °C
  double circadian_amplitude = 0.15;  // °C (0.3 °C peak-to-peak)
  double circadian_period = 86400.0;  // s
  double slow_drift_rate = 0.0;       // °C/day

  double temperature(double t) const noexcept;
  void validate() const;
};

struct NoiseModel {
  double sensor_white_sigma = 2e-4;  // °C
  double quantization_step = 1e-5;   // °C
  double fill_error_sigma = 5e-5;    // kg (0.05 ml of water)
  std::uint64_t rng_seed = 0;

  /// All noise sources off; quantization pushed far below any tolerance.
  static NoiseModel noiseless();
  void validate() const;
};

enum class EventShape { gaussian_bump, raised_cosine };

/// Requested temperature excursion on one fluid channel.
struct FluctuationEventSpec {
  Channel channel = Channel::fluid_L;
  double start = 0.0;      // s
  double duration = 1800;  // s
  double amplitude = 1.5e-3;  // °C, negative for a cooling excursion
  EventShape shape = EventShape::gaussian_bump;
};

struct CalorimeterConfig {
  Mode mode = Mode::active;
  FluidPair sample_mass{0.015, 0.015};  // kg
  double specific_heat_base = 4186.0;   // J/(kg·°C)
  double dC_over_C_injected = 0.0;      // applied to the left channel
  FluidPair container_heat_capacity{1.0, 1.0};             // J/°C
  FluidPair thermal_resistance_sample_chamber{2.0, 2.0};   // °C/W
  double thermal_resistance_channel_leak = 47000.0;        // °C/W per channel
  HeatDistribution heat_distribution = HeatDistribution::equal_split;
  double thermal_resistance_chamber_env = 3.0;  // °C/W, passive mode
  double chamber_heat_capacity = 2000.0;        // J/°C, passive mode
  ThermostatProfile thermostat;
  EnvironmentModel environment;
  NoiseModel noise;
  FluidPair initial_temps{22.0, 22.0};  // °C
  /// Defaults to the first setpoint (active) or the environment mean (passive).
  std::optional<double> initial_chamber_temp;
  double sample_period = 1.0;  // s
  double duration = 10800.0;   // s
  /// 0 selects sample_period subdivided as needed for stability.
  double integration_step = 0.0;

  /// Fluid specific heat of each channel (left carries the injected change).
  FluidPair specific_heat() const noexcept;
  /// Total heat capacity m*c + C_container of each channel for given masses.
  FluidPair channel_heat_capacity(FluidPair masses) const noexcept;
  /// Number of emitted samples: floor(duration / sample_period) + 1.
  std::size_t sample_count() const noexcept;

  void validate() const;
};

}  // namespace diffcal::sim
