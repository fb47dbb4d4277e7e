#include "diffcal/error.hpp"

#include <cmath>

namespace diffcal {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "argument.invalid";
    case ErrorCode::invalid_config: return "config.invalid";
    case ErrorCode::unstable_step: return "sim.unstable_step";
    case ErrorCode::begin_tolerance: return "protocol.begin_tolerance";
    case ErrorCode::trace_too_short: return "protocol.trace_too_short";
    case ErrorCode::no_steady_state: return "protocol.no_steady_state";
    case ErrorCode::rank_deficient: return "fit.rank_deficient";
    case ErrorCode::no_convergence: return "fit.no_convergence";
    case ErrorCode::malformed_trace: return "trace.malformed";
    case ErrorCode::ragged_row: return "trace.ragged_row";
    case ErrorCode::non_finite: return "trace.non_finite";
    case ErrorCode::degenerate_window: return "signal.degenerate_window";
    case ErrorCode::no_extrema: return "signal.no_extrema";
    case ErrorCode::io_failure: return "io.failure";
  }
  return "unknown";
}

void require_finite(double value, std::string_view what) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + " must be finite");
  }
}

}  // namespace diffcal
