#include "diffcal/estimator/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "diffcal/error.hpp"
#include "diffcal/estimator/error_budget.hpp"

namespace diffcal::est {

namespace {

double window_mean(const TimeSeries& s, double t0, double t1, bool include_end,
                   const char* what) {
  if (!s.covers(t0, include_end ? t1 : t1 - s.period)) {
    throw Error(ErrorCode::trace_too_short,
                fmt::format("trace does not cover the {} window [{:.1f}, {:.1f}] s",
                            what, t0, t1));
  }
  const IndexRange r = s.range(t0, t1, include_end);
  if (r.empty()) {
    throw Error(ErrorCode::trace_too_short,
                fmt::format("{} window [{:.1f}, {:.1f}] s holds no samples",
                            what, t0, t1));
  }
  return s.mean(r);
}

void check_trace(const MultiChannelTrace& trace, double step_time) {
  trace.validate();
  require_finite(step_time, "step_time");
}

}  // namespace

std::string_view protocol_name(Protocol p) noexcept {
  return p == Protocol::type1 ? "type1" : "type2";
}

std::string_view kind_name(AttemptKind k) noexcept {
  return k == AttemptKind::control ? "control" : "experimental";
}

std::string mark_label(double offset_s) {
  const double minutes = offset_s / 60.0;
  if (std::abs(minutes - std::round(minutes)) < 1e-9) {
    return fmt::format("{}min", static_cast<long long>(std::llround(minutes)));
  }
  return fmt::format("{}s", offset_s);
}

double mass_ratio_k(double m_L, double m_R) {
  if (!(m_L > 0.0) || !(m_R > 0.0) || !std::isfinite(m_L) ||
      !std::isfinite(m_R)) {
    throw Error(ErrorCode::invalid_argument, "masses must be positive");
  }
  return m_R / m_L;
}

double water_equivalent_mass(double water_mass, double container_heat_capacity,
                             double specific_heat) {
  if (!(specific_heat > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "specific heat must be positive");
  }
  return water_mass + container_heat_capacity / specific_heat;
}

AttemptRecord extract_type1(const MultiChannelTrace& trace, double step_time,
                            std::span<const double> mark_offsets,
                            const Type1Options& options) {
  check_trace(trace, step_time);
  if (mark_offsets.empty()) {
    throw Error(ErrorCode::invalid_argument, "type 1 needs at least one mark");
  }
  const TimeSeries left = trace.series(Channel::fluid_L);
  const TimeSeries right = trace.series(Channel::fluid_R);

  AttemptRecord rec;
  rec.kind = options.kind;
  rec.protocol = Protocol::type1;
  rec.k = options.k;
  const double b0 = step_time - options.begin_window;
  rec.T_begin_L = window_mean(left, b0, step_time, false, "begin");
  rec.T_begin_R = window_mean(right, b0, step_time, false, "begin");

  const double gap = std::abs(rec.T_begin_L - rec.T_begin_R);
  if (gap > options.begin_tolerance) {
    throw Error(ErrorCode::begin_tolerance,
                fmt::format("|T_L^begin - T_R^begin| = {:.6f} C exceeds the "
                            "{} C type-1 tolerance; use the type2 protocol",
                            gap, options.begin_tolerance));
  }

  const double hw = options.mark_half_window;
  for (double offset : mark_offsets) {
    const double c = step_time + offset;
    Mark m;
    m.label = mark_label(offset);
    m.offset = offset;
    m.T_end_L = window_mean(left, c - hw, c + hw, true, m.label.c_str());
    m.T_end_R = window_mean(right, c - hw, c + hw, true, m.label.c_str());
    m.dt = m.T_end_L - m.T_end_R;
    m.delta_T_control = m.T_end_R - rec.T_begin_R;
    rec.marks.push_back(std::move(m));
  }
  return rec;
}

AttemptRecord extract_type2(const MultiChannelTrace& trace, double step_time,
                            const Type2Options& options) {
  check_trace(trace, step_time);
  options.flatness.validate();
  const TimeSeries left = trace.series(Channel::fluid_L);
  const TimeSeries right = trace.series(Channel::fluid_R);

  AttemptRecord rec;
  rec.kind = options.kind;
  rec.protocol = Protocol::type2;
  rec.k = options.k;
  const double b0 = step_time - options.begin_window;
  rec.T_begin_L = window_mean(left, b0, step_time, false, "begin");
  rec.T_begin_R = window_mean(right, b0, step_time, false, "begin");

  const TimeSeries diff = trace.differential();
  const IndexRange after = diff.range(step_time, diff.end_time(), true);
  if (after.size() < 2) {
    throw Error(ErrorCode::no_steady_state, "trace ends at the step");
  }
  const auto detected =
      signal::detect_steady_state(diff.slice(after), options.flatness);
  if (!detected) {
    throw Error(ErrorCode::no_steady_state,
                "differential never becomes flat after the step");
  }
  const double z0 = *detected;
  const double z1 = z0 + options.zone4_window;
  if (!diff.covers(z0, z1 - diff.period)) {
    throw Error(ErrorCode::no_steady_state,
                "trace ends before the zone-4 window completes");
  }
  rec.steady_time = z0;

  Mark m;
  m.label = "steady";
  m.offset = z0 - step_time;
  m.T_end_L = window_mean(left, z0, z1, false, "zone-4");
  m.T_end_R = window_mean(right, z0, z1, false, "zone-4");
  m.dt = window_mean(diff, z0, z1, false, "zone-4");
  m.delta_T_control = m.T_end_R - rec.T_begin_R;
  rec.marks.push_back(std::move(m));
  return rec;
}

double calibrate_dt(double dt_experiment, std::span<const double> dt_controls) {
  if (dt_controls.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "calibration needs at least one control value");
  }
  const double mean =
      std::accumulate(dt_controls.begin(), dt_controls.end(), 0.0) /
      static_cast<double>(dt_controls.size());
  return dt_experiment - mean;
}

HeatCapacityEstimate estimate_dC_over_C(double dt, double delta_T_control,
                                        double k,
                                        const EstimateContext& context) {
  require_finite(dt, "dt");
  require_finite(delta_T_control, "delta_T_control");
  require_finite(k, "k");
  if (delta_T_control == 0.0) {
    throw Error(ErrorCode::invalid_argument, "delta_T_control is zero");
  }
  const double ratio = 1.0 + dt / delta_T_control;
  if (!(ratio > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "non-physical dt: 1 + dt/delta_T_control must be positive");
  }
  HeatCapacityEstimate e;
  e.value = k / ratio - 1.0;
  e.protocol = context.protocol;
  e.mark_label = context.mark_label;
  e.calibrated = context.calibrated;
  if ((context.sigma_dt > 0.0 || context.sigma_k > 0.0) &&
      delta_T_control > 0.0) {
    e.sigma = error_budget(context.sigma_dt, delta_T_control, context.sigma_k,
                           dt, k)
                  .total_dC_over_C_sigma;
  }
  return e;
}

double infer_step_time(const MultiChannelTrace& trace) {
  trace.validate();
  const auto& a1 = trace[Channel::air_1];
  const auto& a2 = trace[Channel::air_2];
  const std::size_t n = trace.size();
  std::vector<double> air(n);
  for (std::size_t i = 0; i < n; ++i) air[i] = 0.5 * (a1[i] + a2[i]);

  const std::size_t edge = std::max<std::size_t>(1, n / 20);
  const double pre = median_of({air.begin(), air.begin() + edge});
  const double post = median_of({air.end() - edge, air.end()});
  const double change = std::abs(post - pre);
  if (change < 0.1) {
    throw Error(ErrorCode::invalid_argument,
                "air channels show no setpoint step; pass the step time "
                "explicitly");
  }
  const double threshold = std::max(0.005 * change, 0.005);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(air[i] - pre) > threshold) return trace.time_at(i - 1);
  }
  throw Error(ErrorCode::invalid_argument, "setpoint step not found");
}

}  // namespace diffcal::est
