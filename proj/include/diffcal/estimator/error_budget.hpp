#pragma once

namespace diffcal::est {

/// First-order uncertainty of dC/C.
///
/// Sensor error is folded into `sigma_dt_zone4` by the caller. Inhomogeneous
/// temperature distribution has no propagation model; it is carried as a
/// declared dC/C component.
struct ErrorBudget {
  double sigma_dt_zone4 = 0.0;       // °C, input
  double sigma_fill_k = 0.0;         // input
  double sigma_inhomogeneity = 0.0;  // dC/C, declared
  double dt_component = 0.0;         // |d(dC/C)/d dt| * sigma_dt
  double k_component = 0.0;          // |d(dC/C)/dk| * sigma_k
  double total_dC_over_C_sigma = 0.0;  // root-sum-square of the components
  double worst_case = 0.0;             // linear sum of the components
};

/// Propagates sigma_dt and sigma_k through k / (1 + dt/dT) - 1. Throws
/// ErrorCode::invalid_argument on negative sigmas, dT <= 0 or dt <= -dT.
ErrorBudget error_budget(double sigma_dt, double delta_T_control,
                         double sigma_k, double dt, double k,
                         double sigma_inhomogeneity = 0.0);

}  // namespace diffcal::est
