#include "diffcal/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "diffcal/error.hpp"
#include "diffcal/rng.hpp"
#include "diffcal/sim/thermal_network.hpp"

namespace diffcal::sim {

namespace {

// Independent RNG sub-streams per noise source.
constexpr std::uint64_t kFillStream = 1;
constexpr std::uint64_t kControlStream = 2;
constexpr std::uint64_t kSensorStreamBase = 10;

FluidPair realize_masses(const CalorimeterConfig& config) {
  FluidPair m = config.sample_mass;
  if (config.noise.fill_error_sigma > 0.0) {
    Rng rng(config.noise.rng_seed, kFillStream);
    m.L += config.noise.fill_error_sigma * rng.normal();
    m.R += config.noise.fill_error_sigma * rng.normal();
  }
  if (!(m.L > 0.0) || !(m.R > 0.0)) {
    throw Error(ErrorCode::invalid_config,
                "fill error produced a non-positive sample mass");
  }
  return m;
}

std::vector<double> control_noise(const CalorimeterConfig& config,
                                  std::size_t n) {
  std::vector<double> u(n, 0.0);
  const double bound = config.thermostat.control_accuracy;
  if (config.mode != Mode::active || bound <= 0.0) return u;
  Rng rng(config.noise.rng_seed, kControlStream);
  const double rho = std::exp(-config.sample_period /
                              config.thermostat.noise_correlation_time);
  const double sigma = 0.5 * bound;
  const double innovation = sigma * std::sqrt(1.0 - rho * rho);
  double state = std::clamp(sigma * rng.normal(), -bound, bound);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = state;
    state = std::clamp(rho * state + innovation * rng.normal(), -bound, bound);
  }
  return u;
}

double interpolate(const std::vector<double>& v, double period, double t) {
  if (v.empty()) return 0.0;
  const double pos = t / period;
  if (pos <= 0.0) return v.front();
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

void validate_event(const FluctuationEventSpec& spec,
                    const CalorimeterConfig& config) {
  if (spec.channel != Channel::fluid_L && spec.channel != Channel::fluid_R) {
    throw Error(ErrorCode::invalid_argument,
                "events can only be injected on fluid channels");
  }
  require_finite(spec.start, "event start");
  require_finite(spec.duration, "event duration");
  require_finite(spec.amplitude, "event amplitude");
  if (spec.duration < 4.0 * config.sample_period) {
    throw Error(ErrorCode::invalid_argument,
                "event duration must span at least 4 sample periods");
  }
  const double slack = 1e-9 * config.duration;
  if (spec.start < 0.0 || spec.start + spec.duration > config.duration + slack) {
    throw Error(ErrorCode::invalid_argument,
                "event must lie within [0, duration]");
  }
}

double quantize(double v, double step) {
  return std::nearbyint(v / step) * step;
}

}  // namespace

double thermostat_setpoint(const ThermostatProfile& profile, double t) {
  if (profile.steps.empty()) {
    throw Error(ErrorCode::invalid_config, "thermostat profile has no steps");
  }
  double sp = profile.steps.front().setpoint;
  for (const auto& s : profile.steps) {
    if (s.time <= t) sp = s.setpoint;
    else break;
  }
  return sp;
}

IntegrationGrid integration_grid(const CalorimeterConfig& config,
                                 FluidPair masses) {
  const ThermalNetwork net(config, masses);
  const double limit = net.min_time_constant() / 4.0;
  IntegrationGrid g;
  if (config.integration_step > 0.0) {
    if (config.integration_step > limit) {
      throw Error(ErrorCode::unstable_step,
                  "integration_step " + std::to_string(config.integration_step) +
                      " s exceeds a quarter of the smallest time constant (" +
                      std::to_string(limit) + " s)");
    }
    g.substeps = static_cast<std::size_t>(
        std::ceil(config.sample_period / config.integration_step - 1e-12));
  } else {
    g.substeps = static_cast<std::size_t>(
        std::ceil(config.sample_period / limit - 1e-12));
  }
  g.substeps = std::max<std::size_t>(g.substeps, 1);
  g.step = config.sample_period / static_cast<double>(g.substeps);
  return g;
}

double event_shape(const FluctuationEventSpec& spec, double t) noexcept {
  const double u = t - spec.start;
  if (u < 0.0 || u > spec.duration || spec.amplitude == 0.0) return 0.0;
  switch (spec.shape) {
    case EventShape::gaussian_bump: {
      const double sigma = spec.duration / 4.0;
      const double z = (u - 0.5 * spec.duration) / sigma;
      const double edge = std::exp(-2.0);
      return spec.amplitude * (std::exp(-0.5 * z * z) - edge) / (1.0 - edge);
    }
    case EventShape::raised_cosine:
      return spec.amplitude * 0.5 *
             (1.0 - std::cos(2.0 * std::numbers::pi * u / spec.duration));
  }
  return 0.0;
}

double event_shape_rate(const FluctuationEventSpec& spec, double t) noexcept {
  const double u = t - spec.start;
  if (u < 0.0 || u > spec.duration || spec.amplitude == 0.0) return 0.0;
  switch (spec.shape) {
    case EventShape::gaussian_bump: {
      const double sigma = spec.duration / 4.0;
      const double z = (u - 0.5 * spec.duration) / sigma;
      const double edge = std::exp(-2.0);
      return spec.amplitude * std::exp(-0.5 * z * z) * (-z / sigma) /
             (1.0 - edge);
    }
    case EventShape::raised_cosine: {
      const double w = 2.0 * std::numbers::pi / spec.duration;
      return spec.amplitude * 0.5 * w * std::sin(w * u);
    }
  }
  return 0.0;
}

TimeSeries render_event_power(const FluctuationEventSpec& spec,
                              const CalorimeterConfig& config) {
  return render_event_power(spec, config, config.sample_mass);
}

TimeSeries render_event_power(const FluctuationEventSpec& spec,
                              const CalorimeterConfig& config,
                              FluidPair masses) {
  validate_event(spec, config);
  const std::size_t n = config.sample_count();
  TimeSeries power{0.0, config.sample_period, std::vector<double>(n, 0.0)};
  if (spec.amplitude == 0.0) return power;

  // Invert the excursion dynamics: prescribe the target channel's excursion,
  // integrate the remaining nodes (sources at zero) and read off the heat
  // input that sustains the prescription.
  const ThermalNetwork net(config, masses);
  const IntegrationGrid grid = integration_grid(config, masses);
  const std::size_t target = spec.channel == Channel::fluid_L ? kNodeL : kNodeR;
  const double cap =
      target == kNodeL ? net.heat_capacity().L : net.heat_capacity().R;
  const NetworkDrive zero{};

  auto rate = [&](double t, NetworkState x) {
    x[target] = event_shape(spec, t);
    NetworkState dx = net.derivative(x, zero);
    dx[target] = 0.0;
    return dx;
  };

  NetworkState x{};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = power.time_at(i);
    x[target] = event_shape(spec, t);
    const double natural = cap * net.derivative(x, zero)[target];
    power.values[i] = cap * event_shape_rate(spec, t) - natural;
    if (i + 1 == n) break;
    double ts = t;
    for (std::size_t s = 0; s < grid.substeps; ++s) {
      const double h = grid.step;
      const NetworkState k1 = rate(ts, x);
      NetworkState y = x;
      for (std::size_t j = 0; j < 3; ++j) y[j] = x[j] + 0.5 * h * k1[j];
      const NetworkState k2 = rate(ts + 0.5 * h, y);
      for (std::size_t j = 0; j < 3; ++j) y[j] = x[j] + 0.5 * h * k2[j];
      const NetworkState k3 = rate(ts + 0.5 * h, y);
      for (std::size_t j = 0; j < 3; ++j) y[j] = x[j] + h * k3[j];
      const NetworkState k4 = rate(ts + h, y);
      for (std::size_t j = 0; j < 3; ++j) {
        x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      }
      ts = t + static_cast<double>(s + 1) * h;
    }
  }
  return power;
}

StateHistory simulate_states(const CalorimeterConfig& config,
                             std::span<const FluctuationEventSpec> events) {
  config.validate();
  for (const auto& e : events) validate_event(e, config);

  StateHistory h;
  h.sample_period = config.sample_period;
  h.masses = realize_masses(config);
  const ThermalNetwork net(config, h.masses);
  h.heat_capacity = net.heat_capacity();
  h.grid = integration_grid(config, h.masses);

  const std::size_t n = config.sample_count();
  const std::vector<double> offset = control_noise(config, n);

  std::vector<double> power_l(n, 0.0);
  std::vector<double> power_r(n, 0.0);
  for (const auto& e : events) {
    const TimeSeries p = render_event_power(e, config, h.masses);
    auto& dst = e.channel == Channel::fluid_L ? power_l : power_r;
    for (std::size_t i = 0; i < n; ++i) dst[i] += p.values[i];
  }
  const bool has_power = !events.empty();

  const double chamber0 = config.initial_chamber_temp.value_or(
      config.mode == Mode::active
          ? config.thermostat.steps.front().setpoint
          : config.environment.temperature(0.0));
  NetworkState x{config.initial_temps.L, config.initial_temps.R, chamber0};

  h.fluid_L.resize(n);
  h.fluid_R.resize(n);
  h.chamber.resize(n);
  h.chamber_seen.resize(n);
  h.env.resize(n);

  const double period = config.sample_period;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * period;
    h.fluid_L[i] = x[kNodeL];
    h.fluid_R[i] = x[kNodeR];
    h.chamber[i] = x[kNodeChamber];
    h.chamber_seen[i] = x[kNodeChamber] + offset[i];
    h.env[i] = config.environment.temperature(t);
    if (i + 1 == n) break;

    for (std::size_t s = 0; s < h.grid.substeps; ++s) {
      const double ts = t + static_cast<double>(s) * h.grid.step;
      // Setpoint and control noise are held over each step.
      const double setpoint = thermostat_setpoint(config.thermostat, ts);
      auto drive_at = [&](double tau) {
        NetworkDrive d;
        d.setpoint = setpoint;
        d.control_offset = offset[i];
        d.env = config.environment.temperature(tau);
        if (has_power) {
          d.power = {interpolate(power_l, period, tau),
                     interpolate(power_r, period, tau)};
        }
        return d;
      };
      x = net.rk4_step(x, ts, h.grid.step, drive_at);
      ++h.rk4_steps;
    }
  }
  return h;
}

MultiChannelTrace simulate_attempt(
    const CalorimeterConfig& config,
    std::span<const FluctuationEventSpec> events) {
  const StateHistory h = simulate_states(config, events);
  MultiChannelTrace trace;
  trace.sample_period = config.sample_period;
  trace.start_time = 0.0;
  trace[Channel::fluid_L] = h.fluid_L;
  trace[Channel::fluid_R] = h.fluid_R;
  trace[Channel::air_1] = h.chamber_seen;
  trace[Channel::air_2] = h.chamber_seen;
  trace[Channel::env] = h.env;

  const double sigma = config.noise.sensor_white_sigma;
  const double q = config.noise.quantization_step;
  for (Channel c : kChannelOrder) {
    auto& v = trace[c];
    if (sigma > 0.0) {
      Rng rng(config.noise.rng_seed,
              kSensorStreamBase + static_cast<std::uint64_t>(c));
      for (double& s : v) s += sigma * rng.normal();
    }
    for (double& s : v) s = quantize(s, q);
  }
  return trace;
}

}  // namespace diffcal::sim
