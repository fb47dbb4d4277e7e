#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diffcal/error.hpp"
#include "diffcal/estimator/estimator.hpp"
#include "diffcal/sim/config.hpp"

namespace diffcal::harness {

enum class ProtocolChoice { type1, type2, both };

/// Zero-level calibration: subtract the mean control dt of the mark, or the
/// dt of the control attempt paired with each experimental attempt.
enum class CalibrationMode { control_mean, paired };

struct ExperimentPlan {
  sim::CalorimeterConfig base_config;
  std::string profile_label = "22->24";
  int n_control = 20;
  int n_experimental = 20;
  double injected_dC_over_C = 0.0;
  ProtocolChoice protocol = ProtocolChoice::both;
  std::vector<double> mark_offsets{1800.0, 2700.0, 3600.0};  // s after step
  std::uint64_t seed_base = 1;
  /// Second setpoint time; defaults to the last thermostat step.
  std::optional<double> step_time;
  /// Treatment plus zone-1 time before the step, only used for labels.
  double handling_time = 1200.0;  // s
  /// Initial temperature offsets of experimental samples (treatment heat).
  sim::FluidPair experimental_initial_offset{0.0, 0.0};
  CalibrationMode calibration = CalibrationMode::control_mean;
  est::Type1Options type1{};
  est::Type2Options type2{};
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;

  void validate() const;
  double resolved_step_time() const;
  /// Nominal k from the configured masses, containers as water equivalent.
  double nominal_k() const;
};

std::string_view protocol_choice_name(ProtocolChoice p) noexcept;
ProtocolChoice parse_protocol_choice(std::string_view text);

/// One protocol's extraction of one simulated attempt.
struct AttemptResult {
  int index = 0;  // within its kind
  std::uint64_t seed = 0;
  est::AttemptRecord record;
  /// Experimental attempts only: calibrated dt and estimate per mark.
  std::vector<double> calibrated_dt;
  std::vector<est::HeatCapacityEstimate> estimates;
};

struct AttemptFailure {
  est::AttemptKind kind = est::AttemptKind::experimental;
  est::Protocol protocol = est::Protocol::type1;
  int index = 0;
  std::uint64_t seed = 0;
  ErrorCode code = ErrorCode::invalid_argument;
  std::string message;
};

struct SummaryRow {
  est::Protocol protocol = est::Protocol::type1;
  std::string mark;
  std::string time_after_excitation;  // label, mark offset + handling time
  int n = 0;                          // experimental attempts in the row
  int n_control = 0;
  double delta_T_mean = 0.0, delta_T_sd = 0.0;
  double dt_mean = 0.0, dt_sd = 0.0;  // calibrated
  double dt_se = 0.0;  // of dt_mean, including the control-mean uncertainty
  double dC_over_C_mean = 0.0, dC_over_C_sd = 0.0;
  /// Standard error of dC_over_C_mean including the control-mean
  /// uncertainty carried by the calibration.
  double se = 0.0;
};

struct SummaryTable {
  std::string profile_label;
  std::vector<SummaryRow> rows;
};

struct BatchResult {
  std::vector<AttemptResult> controls;
  std::vector<AttemptResult> experiments;
  std::vector<AttemptFailure> failures;
  SummaryTable summary;
};

/// Runs every attempt of the plan and summarizes the calibrated estimates.
/// Per-attempt errors are collected in `failures`; the batch throws only when
/// no row can be produced. Results do not depend on the thread count.
BatchResult run_batch(const ExperimentPlan& plan);

struct RecoveryRow {
  est::Protocol protocol = est::Protocol::type1;
  std::string mark;
  double mean = 0.0;
  double bias = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;  // |z| < 3
};

/// Bias and z-score of every summary row against a known value. Uses the
/// row's `se`, or StDev/sqrt(N) when it is not set.
std::vector<RecoveryRow> recovery_report(double true_value,
                                         const SummaryTable& summary);

}  // namespace diffcal::harness
