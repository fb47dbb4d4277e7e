#include "diffcal/estimator/error_budget.hpp"

#include <cmath>

#include "diffcal/error.hpp"

namespace diffcal::est {

ErrorBudget error_budget(double sigma_dt, double delta_T_control,
                         double sigma_k, double dt, double k,
                         double sigma_inhomogeneity) {
  for (double v : {sigma_dt, delta_T_control, sigma_k, dt, k,
                   sigma_inhomogeneity}) {
    require_finite(v, "error budget input");
  }
  if (sigma_dt < 0.0 || sigma_k < 0.0 || sigma_inhomogeneity < 0.0) {
    throw Error(ErrorCode::invalid_argument, "sigmas must be non-negative");
  }
  if (!(delta_T_control > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "delta_T_control must be positive");
  }
  const double ratio = 1.0 + dt / delta_T_control;
  if (!(ratio > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "dt must exceed -delta_T_control");
  }

  ErrorBudget b;
  b.sigma_dt_zone4 = sigma_dt;
  b.sigma_fill_k = sigma_k;
  b.sigma_inhomogeneity = sigma_inhomogeneity;
  const double d_dt = k / (delta_T_control * ratio * ratio);
  const double d_k = 1.0 / ratio;
  b.dt_component = d_dt * sigma_dt;
  b.k_component = d_k * sigma_k;
  b.total_dC_over_C_sigma =
      std::sqrt(b.dt_component * b.dt_component +
                b.k_component * b.k_component +
                sigma_inhomogeneity * sigma_inhomogeneity);
  b.worst_case = b.dt_component + b.k_component + sigma_inhomogeneity;
  return b;
}

}  // namespace diffcal::est
