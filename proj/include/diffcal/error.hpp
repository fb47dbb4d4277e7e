#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diffcal {

/// Machine-readable failure category. The CLI prints `code_name()` as the
/// prefix of every error line.
enum class ErrorCode {
  invalid_argument,
  invalid_config,
  unstable_step,
  begin_tolerance,
  trace_too_short,
  no_steady_state,
  rank_deficient,
  no_convergence,
  malformed_trace,
  ragged_row,
  non_finite,
  degenerate_window,
  no_extrema,
  io_failure,
};

std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Throws Error(invalid_argument) unless `value` is finite.
void require_finite(double value, std::string_view what);

}  // namespace diffcal
