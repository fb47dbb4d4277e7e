#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffcal/signal/steady_state.hpp"
#include "diffcal/trace.hpp"

namespace diffcal::est {

enum class AttemptKind { control, experimental };
enum class Protocol { type1, type2 };

std::string_view protocol_name(Protocol p) noexcept;
std::string_view kind_name(AttemptKind k) noexcept;

/// Readings at one mark of an attempt (type 1: a fixed offset after the
/// second setpoint; type 2: the zone-4 window).
struct Mark {
  std::string label;     // "30min", "45min", "60min" or "steady"
  double offset = 0.0;   // s after the step (type 2: detection offset)
  double T_end_L = 0.0;  // °C
  double T_end_R = 0.0;  // °C
  double dt = 0.0;       // T_end_L - T_end_R
  double delta_T_control = 0.0;  // T_end_R - T_begin_R
};

struct AttemptRecord {
  AttemptKind kind = AttemptKind::experimental;
  Protocol protocol = Protocol::type1;
  double T_begin_L = 0.0;
  double T_begin_R = 0.0;
  std::vector<Mark> marks;
  double k = 1.0;
  std::optional<double> steady_time;  // type 2: detected zone-4 start (s)
};

/// Label for a mark offset: whole minutes as "30min", otherwise seconds
/// as "95s".
std::string mark_label(double offset_s);

/// m_R / m_L; both masses must be positive.
double mass_ratio_k(double m_L, double m_R);

/// Water mass plus the container's heat capacity expressed as water.
double water_equivalent_mass(double water_mass, double container_heat_capacity,
                             double specific_heat);

struct Type1Options {
  double begin_tolerance = 0.1;    // °C
  double begin_window = 300.0;     // s, ending at the step
  double mark_half_window = 60.0;  // s, centered on each mark
  AttemptKind kind = AttemptKind::experimental;
  double k = 1.0;
};

/// Fixed-offset readings after the second setpoint. Throws
/// ErrorCode::begin_tolerance when the channels start too far apart (use
/// type 2) and ErrorCode::trace_too_short when a window leaves the trace.
AttemptRecord extract_type1(const MultiChannelTrace& trace, double step_time,
                            std::span<const double> mark_offsets,
                            const Type1Options& options = {});

struct Type2Options {
  signal::SteadyStateCriterion flatness{};
  double begin_window = 300.0;  // s, ending at the step
  double zone4_window = 600.0;  // s, starting at detection
  AttemptKind kind = AttemptKind::experimental;
  double k = 1.0;
};

/// Steady-state (zone 4) readings: dt is the mean differential over the
/// window starting where the differential first becomes flat after the step.
/// Throws ErrorCode::no_steady_state if that never happens within the trace.
AttemptRecord extract_type2(const MultiChannelTrace& trace, double step_time,
                            const Type2Options& options = {});

/// Zero-level calibration: dt_experiment - mean(dt_controls).
double calibrate_dt(double dt_experiment, std::span<const double> dt_controls);

struct HeatCapacityEstimate {
  double value = 0.0;  // dC/C
  double sigma = 0.0;
  Protocol protocol = Protocol::type1;
  std::string mark_label;
  bool calibrated = false;
};

/// Optional context carried into the estimate.
struct EstimateContext {
  Protocol protocol = Protocol::type1;
  std::string mark_label;
  bool calibrated = false;
  double sigma_dt = 0.0;  // °C, propagated into `sigma` when non-zero
  double sigma_k = 0.0;
};

/// dC/C = k / (1 + dt / dT_control) - 1.
HeatCapacityEstimate estimate_dC_over_C(double dt, double delta_T_control,
                                        double k,
                                        const EstimateContext& context = {});

/// Infers the second setpoint time from the air channels: the first sample
/// before the mean air temperature departs from its initial level by more
/// than 0.5% of the total change (at least 0.005 °C).
double infer_step_time(const MultiChannelTrace& trace);

}  // namespace diffcal::est
