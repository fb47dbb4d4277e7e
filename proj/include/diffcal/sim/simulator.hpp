#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffcal/series.hpp"
#include "diffcal/sim/config.hpp"
#include "diffcal/trace.hpp"

namespace diffcal::sim {

/// Setpoint of the latest step with time <= t; the first step's setpoint
/// before that.
double thermostat_setpoint(const ThermostatProfile& profile, double t);

/// Fixed RK4 step chosen for a configuration.
struct IntegrationGrid {
  double step = 1.0;             // s
  std::size_t substeps = 1;      // RK4 steps per sample period
};

/// Step = sample_period subdivided until it is at most a quarter of the
/// smallest time constant. An explicit `integration_step` larger than that
/// bound is rejected with ErrorCode::unstable_step.
IntegrationGrid integration_grid(const CalorimeterConfig& config,
                                 FluidPair masses);

/// Noise-free node temperatures at each sample (what the sensors look at).
struct StateHistory {
  double sample_period = 1.0;
  std::vector<double> fluid_L;
  std::vector<double> fluid_R;
  std::vector<double> chamber;         // integrated chamber node
  std::vector<double> chamber_seen;    // chamber + control noise
  std::vector<double> env;
  FluidPair masses{};                  // realized fill
  FluidPair heat_capacity{};           // m*c + C_container per channel
  IntegrationGrid grid{};
  std::size_t rk4_steps = 0;
};

/// Target excursion of an event at time t (°C) and its time derivative.
double event_shape(const FluctuationEventSpec& spec, double t) noexcept;
double event_shape_rate(const FluctuationEventSpec& spec, double t) noexcept;

/// Heat input (W) on the sample grid over [0, duration] that makes the
/// noiseless linear model follow `event_shape` on the event channel. Uses the
/// nominal masses.
TimeSeries render_event_power(const FluctuationEventSpec& spec,
                              const CalorimeterConfig& config);
TimeSeries render_event_power(const FluctuationEventSpec& spec,
                              const CalorimeterConfig& config,
                              FluidPair masses);

StateHistory simulate_states(const CalorimeterConfig& config,
                             std::span<const FluctuationEventSpec> events);

/// Full attempt: states, then white sensor noise and quantization on every
/// channel. Deterministic in (config, events).
MultiChannelTrace simulate_attempt(
    const CalorimeterConfig& config,
    std::span<const FluctuationEventSpec> events = {});

}  // namespace diffcal::sim
