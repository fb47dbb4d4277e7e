#include "diffcal/harness/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "diffcal/series.hpp"
#include "diffcal/sim/simulator.hpp"

namespace diffcal::harness {

namespace {

using est::AttemptKind;
using est::Protocol;

struct Extraction {
  std::optional<est::AttemptRecord> record;
  ErrorCode code = ErrorCode::invalid_argument;
  std::string message;
};

// Everything one simulated attempt produces, per protocol (type1, type2).
struct AttemptSlot {
  AttemptKind kind = AttemptKind::experimental;
  int index = 0;
  std::uint64_t seed = 0;
  std::array<Extraction, 2> protocols;
};

std::vector<Protocol> protocols_of(ProtocolChoice choice) {
  switch (choice) {
    case ProtocolChoice::type1: return {Protocol::type1};
    case ProtocolChoice::type2: return {Protocol::type2};
    case ProtocolChoice::both: return {Protocol::type1, Protocol::type2};
  }
  return {};
}

std::size_t slot_of(Protocol p) { return p == Protocol::type1 ? 0 : 1; }

sim::CalorimeterConfig attempt_config(const ExperimentPlan& plan,
                                      AttemptKind kind, std::uint64_t seed) {
  sim::CalorimeterConfig cfg = plan.base_config;
  cfg.noise.rng_seed = seed;
  if (kind == AttemptKind::experimental) {
    cfg.dC_over_C_injected = plan.injected_dC_over_C;
    cfg.initial_temps.L += plan.experimental_initial_offset.L;
    cfg.initial_temps.R += plan.experimental_initial_offset.R;
  } else {
    cfg.dC_over_C_injected = 0.0;
  }
  return cfg;
}

void run_slot(const ExperimentPlan& plan, double step_time, double k,
              AttemptSlot& slot) {
  const auto fail_all = [&](ErrorCode code, const std::string& message) {
    for (auto& e : slot.protocols) {
      e.code = code;
      e.message = message;
    }
  };
  MultiChannelTrace trace;
  try {
    trace = sim::simulate_attempt(attempt_config(plan, slot.kind, slot.seed));
  } catch (const Error& e) {
    fail_all(e.code(), e.what());
    return;
  }
  for (Protocol p : protocols_of(plan.protocol)) {
    Extraction& out = slot.protocols[slot_of(p)];
    try {
      if (p == Protocol::type1) {
        est::Type1Options opt = plan.type1;
        opt.kind = slot.kind;
        opt.k = k;
        out.record = est::extract_type1(trace, step_time, plan.mark_offsets, opt);
      } else {
        est::Type2Options opt = plan.type2;
        opt.kind = slot.kind;
        opt.k = k;
        out.record = est::extract_type2(trace, step_time, opt);
      }
    } catch (const Error& e) {
      out.code = e.code();
      out.message = e.what();
    }
  }
}

void run_slots(const ExperimentPlan& plan, double step_time, double k,
               std::vector<AttemptSlot>& slots) {
  unsigned workers = plan.threads != 0 ? plan.threads
                                       : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(1, slots.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < slots.size(); i = next++) {
      run_slot(plan, step_time, k, slots[i]);
    }
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

std::string excitation_label(const ExperimentPlan& plan, Protocol p,
                             double offset) {
  if (p == Protocol::type2) return "steady";
  return est::mark_label(offset + plan.handling_time);
}

}  // namespace

std::string_view protocol_choice_name(ProtocolChoice p) noexcept {
  switch (p) {
    case ProtocolChoice::type1: return "type1";
    case ProtocolChoice::type2: return "type2";
    case ProtocolChoice::both: return "both";
  }
  return "?";
}

ProtocolChoice parse_protocol_choice(std::string_view text) {
  if (text == "type1") return ProtocolChoice::type1;
  if (text == "type2") return ProtocolChoice::type2;
  if (text == "both") return ProtocolChoice::both;
  throw Error(ErrorCode::invalid_argument,
              "unknown protocol '" + std::string(text) +
                  "' (expected type1, type2 or both)");
}

void ExperimentPlan::validate() const {
  base_config.validate();
  if (n_control < 1 || n_experimental < 1) {
    throw Error(ErrorCode::invalid_config, "attempt counts must be at least 1");
  }
  require_finite(injected_dC_over_C, "injected_dC_over_C");
  if (!(injected_dC_over_C > -1.0)) {
    throw Error(ErrorCode::invalid_config, "injected dC/C must exceed -1");
  }
  if (protocol != ProtocolChoice::type2 && mark_offsets.empty()) {
    throw Error(ErrorCode::invalid_config, "type 1 needs at least one mark");
  }
  for (double m : mark_offsets) {
    require_finite(m, "mark offset");
    if (!(m > 0.0)) {
      throw Error(ErrorCode::invalid_config, "mark offsets must be positive");
    }
  }
  require_finite(handling_time, "handling_time");
  require_finite(experimental_initial_offset.L, "initial offset");
  require_finite(experimental_initial_offset.R, "initial offset");
  const double step = resolved_step_time();
  if (!(step > 0.0) || step >= base_config.duration) {
    throw Error(ErrorCode::invalid_config,
                "step time must lie inside the simulated duration");
  }
  type2.flatness.validate();
}

double ExperimentPlan::resolved_step_time() const {
  if (step_time) return *step_time;
  return base_config.thermostat.steps.back().time;
}

double ExperimentPlan::nominal_k() const {
  const double c = base_config.specific_heat_base;
  return est::mass_ratio_k(
      est::water_equivalent_mass(base_config.sample_mass.L,
                                 base_config.container_heat_capacity.L, c),
      est::water_equivalent_mass(base_config.sample_mass.R,
                                 base_config.container_heat_capacity.R, c));
}

BatchResult run_batch(const ExperimentPlan& plan) {
  plan.validate();
  const double step_time = plan.resolved_step_time();
  const double k = plan.nominal_k();

  std::vector<AttemptSlot> slots;
  slots.reserve(static_cast<std::size_t>(plan.n_experimental + plan.n_control));
  for (int i = 0; i < plan.n_experimental; ++i) {
    slots.push_back({AttemptKind::experimental, i,
                     plan.seed_base + static_cast<std::uint64_t>(i), {}});
  }
  for (int i = 0; i < plan.n_control; ++i) {
    slots.push_back({AttemptKind::control, i,
                     plan.seed_base +
                         static_cast<std::uint64_t>(plan.n_experimental + i),
                     {}});
  }
  run_slots(plan, step_time, k, slots);

  BatchResult result;
  result.summary.profile_label = plan.profile_label;
  const auto n_exp = static_cast<std::size_t>(plan.n_experimental);

  for (Protocol p : protocols_of(plan.protocol)) {
    const std::size_t s = slot_of(p);
    const auto fail = [&](const AttemptSlot& slot, ErrorCode code,
                          const std::string& message) {
      result.failures.push_back(
          {slot.kind, p, slot.index, slot.seed, code, message});
    };

    // Controls of this protocol, indexed by control number.
    std::vector<const est::AttemptRecord*> control_by_index(
        static_cast<std::size_t>(plan.n_control), nullptr);
    std::vector<AttemptResult> controls;
    for (std::size_t i = n_exp; i < slots.size(); ++i) {
      const Extraction& e = slots[i].protocols[s];
      if (!e.record) {
        fail(slots[i], e.code, e.message);
        continue;
      }
      controls.push_back({slots[i].index, slots[i].seed, *e.record, {}, {}});
    }
    for (const auto& c : controls) {
      control_by_index[static_cast<std::size_t>(c.index)] = &c.record;
    }

    const std::size_t n_marks =
        p == Protocol::type1 ? plan.mark_offsets.size() : 1;
    std::vector<std::vector<double>> control_dt(n_marks);
    for (const auto& c : controls) {
      for (std::size_t j = 0; j < n_marks; ++j) {
        control_dt[j].push_back(c.record.marks[j].dt);
      }
    }

    std::vector<AttemptResult> experiments;
    for (std::size_t i = 0; i < n_exp; ++i) {
      const AttemptSlot& slot = slots[i];
      const Extraction& e = slot.protocols[s];
      if (!e.record) {
        fail(slot, e.code, e.message);
        continue;
      }
      if (controls.empty()) {
        fail(slot, ErrorCode::invalid_argument,
             "no successful control attempt to calibrate against");
        continue;
      }
      const est::AttemptRecord* pair = nullptr;
      if (plan.calibration == CalibrationMode::paired) {
        pair = control_by_index[static_cast<std::size_t>(slot.index) %
                                control_by_index.size()];
        if (pair == nullptr) {
          fail(slot, ErrorCode::invalid_argument,
               "paired control attempt failed");
          continue;
        }
      }
      AttemptResult r{slot.index, slot.seed, *e.record, {}, {}};
      try {
        for (std::size_t j = 0; j < n_marks; ++j) {
          const est::Mark& m = r.record.marks[j];
          const double cal =
              pair ? est::calibrate_dt(m.dt, std::span(&pair->marks[j].dt, 1))
                   : est::calibrate_dt(m.dt, control_dt[j]);
          r.calibrated_dt.push_back(cal);
          r.estimates.push_back(est::estimate_dC_over_C(
              cal, m.delta_T_control, r.record.k, {p, m.label, true, 0.0, 0.0}));
        }
      } catch (const Error& err) {
        fail(slot, err.code(), err.what());
        continue;
      }
      experiments.push_back(std::move(r));
    }

    if (!experiments.empty()) {
      for (std::size_t j = 0; j < n_marks; ++j) {
        std::vector<double> dT, dt, est_v;
        for (const auto& r : experiments) {
          dT.push_back(r.record.marks[j].delta_T_control);
          dt.push_back(r.calibrated_dt[j]);
          est_v.push_back(r.estimates[j].value);
        }
        SummaryRow row;
        row.protocol = p;
        row.mark = experiments.front().record.marks[j].label;
        row.time_after_excitation = excitation_label(
            plan, p, p == Protocol::type1 ? plan.mark_offsets[j] : 0.0);
        row.n = static_cast<int>(experiments.size());
        row.n_control = static_cast<int>(controls.size());
        row.delta_T_mean = mean_of(dT);
        row.delta_T_sd = stdev_of(dT);
        row.dt_mean = mean_of(dt);
        row.dt_sd = stdev_of(dt);
        row.dC_over_C_mean = mean_of(est_v);
        row.dC_over_C_sd = stdev_of(est_v);
        double var = row.dC_over_C_sd * row.dC_over_C_sd / row.n;
        double dt_var = row.dt_sd * row.dt_sd / row.n;
        if (plan.calibration == CalibrationMode::control_mean) {
          const double ratio = 1.0 + row.dt_mean / row.delta_T_mean;
          const double slope = k / (row.delta_T_mean * ratio * ratio);
          const double s_c = stdev_of(control_dt[j]);
          const double control_var = s_c * s_c / row.n_control;
          var += slope * slope * control_var;
          dt_var += control_var;
        }
        row.se = std::sqrt(var);
        row.dt_se = std::sqrt(dt_var);
        result.summary.rows.push_back(std::move(row));
      }
    }
    for (auto& c : controls) result.controls.push_back(std::move(c));
    for (auto& r : experiments) result.experiments.push_back(std::move(r));
  }

  if (result.summary.rows.empty()) {
    const AttemptFailure& first = result.failures.front();
    throw Error(first.code, "every attempt failed; first failure: " +
                                first.message);
  }
  return result;
}

std::vector<RecoveryRow> recovery_report(double true_value,
                                         const SummaryTable& summary) {
  require_finite(true_value, "true value");
  if (summary.rows.empty()) {
    throw Error(ErrorCode::invalid_argument, "summary has no rows");
  }
  std::vector<RecoveryRow> out;
  for (const auto& row : summary.rows) {
    RecoveryRow r;
    r.protocol = row.protocol;
    r.mark = row.mark;
    r.mean = row.dC_over_C_mean;
    r.bias = row.dC_over_C_mean - true_value;
    r.se = row.se > 0.0 ? row.se
                        : (row.n > 0 ? row.dC_over_C_sd / std::sqrt(row.n) : 0.0);
    if (r.bias == 0.0) {
      r.z = 0.0;
    } else if (r.se > 0.0) {
      r.z = r.bias / r.se;
    } else {
      r.z = std::copysign(std::numeric_limits<double>::infinity(), r.bias);
    }
    r.pass = std::abs(r.z) < 3.0;
    out.push_back(r);
  }
  return out;
}

}  // namespace diffcal::harness
