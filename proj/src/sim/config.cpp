#include "diffcal/sim/config.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "diffcal/error.hpp"

namespace diffcal::sim {

namespace {

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw Error(ErrorCode::invalid_config,
                std::string(what) + " must be positive and finite");
  }
}

void require_non_negative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw Error(ErrorCode::invalid_config,
                std::string(what) + " must be non-negative and finite");
  }
}

}  // namespace

void ThermostatProfile::validate() const {
  if (steps.empty()) {
    throw Error(ErrorCode::invalid_config,
                "thermostat profile needs at least one step");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    require_finite(steps[i].time, "thermostat step time");
    require_finite(steps[i].setpoint, "thermostat setpoint");
    if (i > 0 && !(steps[i].time > steps[i - 1].time)) {
      throw Error(ErrorCode::invalid_config,
                  "thermostat step times must be strictly increasing");
    }
  }
  require_positive(tracking_time_constant, "thermostat.tracking_time_constant");
  require_non_negative(control_accuracy, "thermostat.control_accuracy");
  require_positive(noise_correlation_time, "thermostat.noise_correlation_time");
}

double EnvironmentModel::temperature(double t) const noexcept {
  return mean_temp +
         circadian_amplitude *
             std::sin(2.0 * std::numbers::pi * t / circadian_period) +
         slow_drift_rate * t / 86400.0;
}

void EnvironmentModel::validate() const {
  require_finite(mean_temp, "environment.mean_temp");
  require_non_negative(circadian_amplitude, "environment.circadian_amplitude");
  require_positive(circadian_period, "environment.circadian_period");
  require_finite(slow_drift_rate, "environment.slow_drift_rate");
}

NoiseModel NoiseModel::noiseless() {
  NoiseModel n;
  n.sensor_white_sigma = 0.0;
  n.quantization_step = 1e-12;
  n.fill_error_sigma = 0.0;
  return n;
}

void NoiseModel::validate() const {
  require_non_negative(sensor_white_sigma, "noise.sensor_white_sigma");
  require_positive(quantization_step, "noise.quantization_step");
  require_non_negative(fill_error_sigma, "noise.fill_error_sigma");
}

FluidPair CalorimeterConfig::specific_heat() const noexcept {
  return {specific_heat_base * (1.0 + dC_over_C_injected), specific_heat_base};
}

FluidPair CalorimeterConfig::channel_heat_capacity(
    FluidPair masses) const noexcept {
  const FluidPair c = specific_heat();
  return {masses.L * c.L + container_heat_capacity.L,
          masses.R * c.R + container_heat_capacity.R};
}

std::size_t CalorimeterConfig::sample_count() const noexcept {
  return static_cast<std::size_t>(std::floor(duration / sample_period + 1e-9)) +
         1;
}

void CalorimeterConfig::validate() const {
  require_positive(sample_mass.L, "sample_mass_L");
  require_positive(sample_mass.R, "sample_mass_R");
  require_positive(specific_heat_base, "specific_heat_base");
  require_finite(dC_over_C_injected, "dC_over_C_injected");
  if (!(dC_over_C_injected > -1.0)) {
    throw Error(ErrorCode::invalid_config, "dC_over_C_injected must be > -1");
  }
  require_positive(container_heat_capacity.L, "container_heat_capacity_L");
  require_positive(container_heat_capacity.R, "container_heat_capacity_R");
  require_positive(thermal_resistance_sample_chamber.L,
                   "thermal_resistance_sample_chamber_L");
  require_positive(thermal_resistance_sample_chamber.R,
                   "thermal_resistance_sample_chamber_R");
  require_positive(thermal_resistance_channel_leak,
                   "thermal_resistance_channel_leak");
  require_positive(thermal_resistance_chamber_env,
                   "thermal_resistance_chamber_env");
  require_positive(chamber_heat_capacity, "chamber_heat_capacity");
  require_finite(initial_temps.L, "initial_temp_L");
  require_finite(initial_temps.R, "initial_temp_R");
  if (initial_chamber_temp) {
    require_finite(*initial_chamber_temp, "initial_chamber_temp");
  }
  require_positive(sample_period, "sample_period");
  require_positive(duration, "duration");
  if (duration < sample_period) {
    throw Error(ErrorCode::invalid_config, "duration must be >= sample_period");
  }
  require_non_negative(integration_step, "integration_step");
  thermostat.validate();
  environment.validate();
  noise.validate();
}

}  // namespace diffcal::sim
