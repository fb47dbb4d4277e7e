#pragma once

#include <array>

#include "diffcal/sim/config.hpp"

namespace diffcal::sim {

/// Node temperatures (°C): fluid L, fluid R, chamber.
using NetworkState = std::array<double, 3>;

inline constexpr std::size_t kNodeL = 0;
inline constexpr std::size_t kNodeR = 1;
inline constexpr std::size_t kNodeChamber = 2;

/// External inputs, held or evaluated by the caller at each RK4 stage.
struct NetworkDrive {
  double setpoint = 0.0;        // active mode: chamber tracking target
  double env = 0.0;             // passive mode: environment temperature
  double control_offset = 0.0;  // active mode: chamber control noise
  FluidPair power{};            // W injected into each fluid channel
};

/// Lumped thermal model: two fluid+container nodes sharing one chamber.
///
/// Active mode: the chamber follows the setpoint first-order and is not loaded
/// by the samples; the samples see chamber + control_offset. Passive mode: the
/// chamber is a heat capacity coupled to the environment and to both samples.
class ThermalNetwork {
 public:
  /// `masses` are the realized (fill-perturbed) water masses.
  ThermalNetwork(const CalorimeterConfig& config, FluidPair masses);

  NetworkState derivative(const NetworkState& x,
                          const NetworkDrive& drive) const noexcept;

  /// Heat flow (W) into each fluid from the chamber at state `x`, excluding
  /// injected event power.
  FluidPair chamber_flux(const NetworkState& x,
                         double chamber_temp) const noexcept;

  /// Sum of C_i * T_i over all capacitive nodes (J, relative to 0 °C).
  double energy(const NetworkState& x) const noexcept;

  /// Smallest node time constant: capacity over total attached conductance.
  double min_time_constant() const noexcept;

  const FluidPair& heat_capacity() const noexcept { return capacity_; }
  Mode mode() const noexcept { return mode_; }

  /// One classical RK4 step. `drive_at(t)` supplies the inputs at each stage.
  template <typename DriveFn>
  NetworkState rk4_step(const NetworkState& x, double t, double h,
                        DriveFn&& drive_at) const {
    const NetworkDrive d0 = drive_at(t);
    const NetworkDrive dm = drive_at(t + 0.5 * h);
    const NetworkDrive d1 = drive_at(t + h);
    const NetworkState k1 = derivative(x, d0);
    const NetworkState k2 = derivative(axpy(x, 0.5 * h, k1), dm);
    const NetworkState k3 = derivative(axpy(x, 0.5 * h, k2), dm);
    const NetworkState k4 = derivative(axpy(x, h, k3), d1);
    NetworkState out;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
  }

 private:
  static NetworkState axpy(const NetworkState& x, double a,
                           const NetworkState& y) noexcept {
    return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
  }

  Mode mode_;
  HeatDistribution distribution_;
  FluidPair capacity_;
  FluidPair conductance_;   // 1 / R_sample_chamber
  double leak_conductance_;  // 1 / R_channel_leak
  double env_conductance_;   // 1 / R_chamber_env
  double chamber_capacity_;
  double tracking_tau_;
};

}  // namespace diffcal::sim
