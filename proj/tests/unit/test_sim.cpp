#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diffcal/error.hpp"
#include "diffcal/sim/simulator.hpp"
#include "diffcal/sim/thermal_network.hpp"

namespace diffcal::sim {
namespace {

CalorimeterConfig quiet_config() {
  CalorimeterConfig c;
  c.noise = NoiseModel::noiseless();
  c.thermostat.control_accuracy = 0.0;
  return c;
}

double peak_abs(const std::vector<double>& a, const std::vector<double>& b,
                double* signed_peak = nullptr) {
  double best = 0.0, value = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (std::abs(d) > best) {
      best = std::abs(d);
      value = d;
    }
  }
  if (signed_peak) *signed_peak = value;
  return best;
}

TEST(ThermostatSetpoint, PiecewiseConstant) {
  ThermostatProfile p;
  p.steps = {{0, 22}, {7200, 24}};
  EXPECT_DOUBLE_EQ(thermostat_setpoint(p, 0), 22);
  EXPECT_DOUBLE_EQ(thermostat_setpoint(p, 7200), 24);
  EXPECT_DOUBLE_EQ(thermostat_setpoint(p, 7199.999), 22);
  p.steps = {{0, 21}, {3600, 25}};
  EXPECT_DOUBLE_EQ(thermostat_setpoint(p, 3599), 21);
}

TEST(ThermostatSetpoint, BeforeFirstStepUsesFirstSetpoint) {
  ThermostatProfile p;
  p.steps = {{100, 22}, {200, 24}};
  EXPECT_DOUBLE_EQ(thermostat_setpoint(p, 0), 22);
}

TEST(Config, RejectsInvalidValues) {
  CalorimeterConfig c;
  EXPECT_NO_THROW(c.validate());
  c.sample_mass.L = std::nan("");
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.thermal_resistance_sample_chamber.R = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.dC_over_C_injected = -1.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.duration = 0.5;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.thermostat.steps = {{10, 22}, {10, 24}};
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.noise.quantization_step = 0.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Simulate, SymmetricNullConfigGivesIdenticalFluidChannels) {
  CalorimeterConfig c;
  c.thermostat.steps = {{0, 22}, {7200, 24}};
  c.duration = 10800;
  c.noise.sensor_white_sigma = 0.0;
  c.noise.fill_error_sigma = 0.0;
  const auto t = simulate_attempt(c);
  EXPECT_EQ(t[Channel::fluid_L], t[Channel::fluid_R]);
}

TEST(Simulate, DeterministicForFixedSeed) {
  CalorimeterConfig c;
  c.noise.rng_seed = 99;
  c.duration = 3600;
  const FluctuationEventSpec e{Channel::fluid_R, 600, 1200, 1e-3,
                               EventShape::raised_cosine};
  const auto a = simulate_attempt(c, {&e, 1});
  const auto b = simulate_attempt(c, {&e, 1});
  EXPECT_EQ(a.channels, b.channels);
  c.noise.rng_seed = 100;
  EXPECT_NE(simulate_attempt(c, {&e, 1}).channels, a.channels);
}

TEST(Simulate, SamplesAreQuantized) {
  CalorimeterConfig c;
  c.duration = 1200;
  const double q = c.noise.quantization_step;
  const auto t = simulate_attempt(c);
  for (const auto& ch : t.channels) {
    for (double v : ch) {
      EXPECT_NEAR(v / q, std::nearbyint(v / q), 1e-6);
    }
  }
}

TEST(Simulate, AirChannelsCarryIndependentNoise) {
  CalorimeterConfig c;
  c.duration = 600;
  const auto t = simulate_attempt(c);
  EXPECT_NE(t[Channel::air_1], t[Channel::air_2]);
}

TEST(Simulate, HeavierLeftChannelLagsOnPositiveStep) {
  CalorimeterConfig c = quiet_config();
  c.dC_over_C_injected = 0.05;
  const auto t = simulate_attempt(c);
  const double step = c.thermostat.steps.back().time;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[Channel::fluid_L][i] - t[Channel::fluid_R][i];
    if (t.time_at(i) <= step) {
      EXPECT_NEAR(dt, 0.0, 1e-11);
    } else {
      ASSERT_LT(dt, 0.0) << "at t=" << t.time_at(i);
    }
  }
}

// Chamber tracks the step first-order (tau_c); a sample with tau_f follows
// the cascade response.
TEST(Simulate, StepResponseMatchesCascadeAndFineStep) {
  CalorimeterConfig c = quiet_config();
  const double tau_f = 600.0;
  const double tau_c = c.thermostat.tracking_time_constant;
  const double step = 600.0;
  c.thermostat.steps = {{0, 22}, {step, 24}};
  c.duration = 6000;
  const double cap = c.sample_mass.L * c.specific_heat_base +
                     c.container_heat_capacity.L;
  c.thermal_resistance_sample_chamber = {tau_f / cap, tau_f / cap};
  c.thermal_resistance_channel_leak = 1e30;
  const StateHistory coarse = simulate_states(c, {});
  c.integration_step = coarse.grid.step / 100.0;
  const StateHistory fine = simulate_states(c, {});
  ASSERT_EQ(fine.grid.substeps, coarse.grid.substeps * 100);

  double max_analytic = 0.0, max_fine = 0.0;
  for (std::size_t i = 0; i < coarse.fluid_L.size(); ++i) {
    const double t = static_cast<double>(i) * c.sample_period;
    double expected = 22.0;
    if (t >= step) {
      const double u = t - step;
      expected = 24.0 - 2.0 *
                            (tau_f * std::exp(-u / tau_f) -
                             tau_c * std::exp(-u / tau_c)) /
                            (tau_f - tau_c);
    }
    max_analytic = std::max(max_analytic, std::abs(coarse.fluid_L[i] - expected));
    max_fine = std::max(max_fine, std::abs(coarse.fluid_L[i] - fine.fluid_L[i]));
  }
  EXPECT_LT(max_analytic, 1e-6);
  EXPECT_LT(max_fine, 1e-6);
}

TEST(Simulate, AdiabaticPassiveConservesEnergy) {
  CalorimeterConfig c = quiet_config();
  c.mode = Mode::passive;
  c.thermal_resistance_chamber_env = 1e30;
  c.initial_temps = {25.0, 19.0};
  c.initial_chamber_temp = 21.0;
  c.duration = 1e5;
  const StateHistory h = simulate_states(c, {});
  ASSERT_GE(h.rk4_steps, 100000u);
  const ThermalNetwork net(c, h.masses);
  const double e0 = net.energy({h.fluid_L.front(), h.fluid_R.front(), h.chamber.front()});
  double worst = 0.0;
  for (std::size_t i = 0; i < h.fluid_L.size(); ++i) {
    const double e = net.energy({h.fluid_L[i], h.fluid_R[i], h.chamber[i]});
    worst = std::max(worst, std::abs(e - e0) / std::abs(e0));
  }
  EXPECT_LT(worst, 1e-9);
  // The chamber settled against the fluids; the channel gap only closes
  // through the slow leak.
  EXPECT_NEAR(0.5 * (h.fluid_L.back() + h.fluid_R.back()), h.chamber.back(), 1e-3);
}

TEST(Simulate, ActiveModeSettlesAtSetpoint) {
  CalorimeterConfig c;
  c.sample_period = 1000.0;
  c.duration = 4e7;  // > 10 x the slowest (channel equalization) time constant
  c.thermostat.steps = {{0, 22}, {2000, 24}};
  c.noise.rng_seed = 5;
  const auto t = simulate_attempt(c);
  const double bound = c.thermostat.control_accuracy + 3 * c.noise.sensor_white_sigma;
  for (Channel ch : {Channel::fluid_L, Channel::fluid_R}) {
    const auto& v = t[ch];
    const double mean =
        std::accumulate(v.end() - 1000, v.end(), 0.0) / 1000.0;
    EXPECT_LT(std::abs(mean - 24.0), bound) << channel_name(ch);
  }
}

TEST(Simulate, RejectsUnstableStep) {
  CalorimeterConfig c;
  c.integration_step = 100.0;
  try {
    simulate_attempt(c);
    FAIL() << "expected unstable_step";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unstable_step);
  }
}

TEST(Simulate, RejectsEventOutsideTrace) {
  CalorimeterConfig c;
  c.duration = 3600;
  const FluctuationEventSpec e{Channel::fluid_L, 3000, 1800, 1e-3,
                               EventShape::gaussian_bump};
  EXPECT_THROW(simulate_attempt(c, {&e, 1}), Error);
}

TEST(RenderEventPower, ZeroAmplitudeIsZero) {
  const CalorimeterConfig c;
  const FluctuationEventSpec e{Channel::fluid_L, 1000, 1800, 0.0,
                               EventShape::gaussian_bump};
  const TimeSeries p = render_event_power(e, c);
  EXPECT_EQ(p.size(), c.sample_count());
  EXPECT_TRUE(std::all_of(p.values.begin(), p.values.end(),
                          [](double v) { return v == 0.0; }));
}

TEST(RenderEventPower, RejectsShortDuration) {
  const CalorimeterConfig c;
  const FluctuationEventSpec e{Channel::fluid_L, 1000, 3.0, 1e-3,
                               EventShape::gaussian_bump};
  EXPECT_THROW(render_event_power(e, c), Error);
}

TEST(RenderEventPower, GaussianBumpReachesAmplitude) {
  const CalorimeterConfig c = quiet_config();
  const FluctuationEventSpec e{Channel::fluid_L, 4000, 1800, 1.5e-3,
                               EventShape::gaussian_bump};
  const auto base = simulate_states(c, {});
  const auto with = simulate_states(c, {&e, 1});
  double peak = 0.0;
  peak_abs(with.fluid_L, base.fluid_L, &peak);
  EXPECT_GE(peak, 1.425e-3);
  EXPECT_LE(peak, 1.575e-3);
}

TEST(RenderEventPower, PerChannelCouplingLeavesOtherChannel) {
  CalorimeterConfig c = quiet_config();
  c.heat_distribution = HeatDistribution::per_channel;
  const FluctuationEventSpec e{Channel::fluid_L, 4000, 1800, 1.5e-3,
                               EventShape::gaussian_bump};
  const auto base = simulate_states(c, {});
  const auto with = simulate_states(c, {&e, 1});
  double peak = 0.0;
  peak_abs(with.fluid_L, base.fluid_L, &peak);
  EXPECT_NEAR(peak, 1.5e-3, 0.075e-3);
  EXPECT_LT(peak_abs(with.fluid_R, base.fluid_R), 1e-6);
}

TEST(RenderEventPower, RaisedCosineTrough) {
  const CalorimeterConfig c = quiet_config();
  const FluctuationEventSpec e{Channel::fluid_R, 5000, 1500, -1e-3,
                               EventShape::raised_cosine};
  const auto base = simulate_states(c, {});
  const auto with = simulate_states(c, {&e, 1});
  double trough = 0.0;
  peak_abs(with.fluid_R, base.fluid_R, &trough);
  EXPECT_GE(trough, -1.05e-3);
  EXPECT_LE(trough, -0.95e-3);
}

TEST(EventShape, PeaksAtCenterAndVanishesOutside) {
  const FluctuationEventSpec e{Channel::fluid_L, 100, 400, 2e-3,
                               EventShape::gaussian_bump};
  EXPECT_DOUBLE_EQ(event_shape(e, 300), 2e-3);
  EXPECT_NEAR(event_shape(e, 100), 0.0, 1e-18);
  EXPECT_EQ(event_shape(e, 50), 0.0);
  EXPECT_EQ(event_shape(e, 600), 0.0);
}

}  // namespace
}  // namespace diffcal::sim
