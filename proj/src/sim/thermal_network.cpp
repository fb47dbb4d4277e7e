#include "diffcal/sim/thermal_network.hpp"

#include <algorithm>

namespace diffcal::sim {

ThermalNetwork::ThermalNetwork(const CalorimeterConfig& config,
                               FluidPair masses)
    : mode_(config.mode),
      distribution_(config.heat_distribution),
      capacity_(config.channel_heat_capacity(masses)),
      conductance_{1.0 / config.thermal_resistance_sample_chamber.L,
                   1.0 / config.thermal_resistance_sample_chamber.R},
      leak_conductance_(1.0 / config.thermal_resistance_channel_leak),
      env_conductance_(1.0 / config.thermal_resistance_chamber_env),
      chamber_capacity_(config.chamber_heat_capacity),
      tracking_tau_(config.thermostat.tracking_time_constant) {}

FluidPair ThermalNetwork::chamber_flux(const NetworkState& x,
                                       double chamber_temp) const noexcept {
  const double to_l = (chamber_temp - x[kNodeL]) * conductance_.L;
  const double to_r = (chamber_temp - x[kNodeR]) * conductance_.R;
  FluidPair flux = distribution_ == HeatDistribution::equal_split
                       ? FluidPair{0.5 * (to_l + to_r), 0.5 * (to_l + to_r)}
                       : FluidPair{to_l, to_r};
  flux.L += (chamber_temp - x[kNodeL]) * leak_conductance_;
  flux.R += (chamber_temp - x[kNodeR]) * leak_conductance_;
  return flux;
}

NetworkState ThermalNetwork::derivative(
    const NetworkState& x, const NetworkDrive& drive) const noexcept {
  NetworkState dx{};
  if (mode_ == Mode::active) {
    const double seen = x[kNodeChamber] + drive.control_offset;
    const FluidPair flux = chamber_flux(x, seen);
    dx[kNodeL] = (flux.L + drive.power.L) / capacity_.L;
    dx[kNodeR] = (flux.R + drive.power.R) / capacity_.R;
    dx[kNodeChamber] = (drive.setpoint - x[kNodeChamber]) / tracking_tau_;
  } else {
    const FluidPair flux = chamber_flux(x, x[kNodeChamber]);
    dx[kNodeL] = (flux.L + drive.power.L) / capacity_.L;
    dx[kNodeR] = (flux.R + drive.power.R) / capacity_.R;
    dx[kNodeChamber] =
        ((drive.env - x[kNodeChamber]) * env_conductance_ - flux.L - flux.R) /
        chamber_capacity_;
  }
  return dx;
}

double ThermalNetwork::energy(const NetworkState& x) const noexcept {
  double e = capacity_.L * x[kNodeL] + capacity_.R * x[kNodeR];
  if (mode_ == Mode::passive) e += chamber_capacity_ * x[kNodeChamber];
  return e;
}

double ThermalNetwork::min_time_constant() const noexcept {
  const double g_fluid =
      (distribution_ == HeatDistribution::equal_split
           ? conductance_.L + conductance_.R
           : std::max(conductance_.L, conductance_.R)) +
      leak_conductance_;
  double tau = std::min(capacity_.L, capacity_.R) / g_fluid;
  if (mode_ == Mode::active) {
    tau = std::min(tau, tracking_tau_);
  } else {
    const double g_chamber = env_conductance_ + conductance_.L +
                             conductance_.R + 2.0 * leak_conductance_;
    tau = std::min(tau, chamber_capacity_ / g_chamber);
  }
  return tau;
}

}  // namespace diffcal::sim
