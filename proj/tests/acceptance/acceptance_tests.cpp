#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../property/eq7_properties.hpp"
#include "diffcal/estimator/error_budget.hpp"
#include "diffcal/estimator/estimator.hpp"
#include "diffcal/harness/harness.hpp"
#include "diffcal/rng.hpp"
#include "diffcal/signal/fluctuations.hpp"
#include "diffcal/signal/lead_lag.hpp"
#include "diffcal/signal/steady_state.hpp"
#include "diffcal/sim/simulator.hpp"
#include "diffcal/sim/thermal_network.hpp"

namespace {

using namespace diffcal;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Point evaluation at published column means.
void table_columns() {
  struct Column {
    const char* name;
    double delta_T, dt, expected, table_mean, table_sd;
  };
  const Column cols[] = {
      {"30min", 1.5549, -0.0821, 0.05575, 0.0572, 0.0418},
      {"45min", 1.7690, -0.0696, 0.04096, 0.0417, 0.0288},
      {"60min", 1.8770, -0.0608, 0.03348, 0.0392, 0.0206},
      {"type2", 1.9865, -0.0403, 0.02071, 0.0208, 0.0082},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : cols) {
    const double v = est::estimate_dC_over_C(c.dt, c.delta_T, 1.0).value;
    // One unit in the last reported digit.
    const bool ok = std::abs(v - c.expected) <= 1e-5 &&
                    std::abs(v - c.table_mean) <= c.table_sd;
    pass = pass && ok;
    detail += fmt::format("{}={:.7f} ", c.name, v);
  }
  report(1, "point reproduction at column means", pass, detail);
}

// 2. Batch recovery of an injected value.
void recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  harness::ExperimentPlan plan;
  plan.protocol = harness::ProtocolChoice::type2;
  plan.injected_dC_over_C = 0.0208;
  plan.n_control = 100;
  plan.n_experimental = 100;
  plan.seed_base = 1;
  const auto result = harness::run_batch(plan);
  const auto rows = harness::recovery_report(0.0208, result.summary);
  const double elapsed = seconds_since(t0);
  if (rows.size() != 1) {
    report(2, "end-to-end recovery", false, fmt::format("{} summary rows", rows.size()));
    return;
  }
  const auto& r = rows.front();
  const auto& s = result.summary.rows.front();
  const bool pass = std::abs(r.bias) <= 0.002 && std::abs(r.z) < 3.0 && s.n == 100 &&
                    elapsed < 120.0;
  report(2, "end-to-end recovery", pass,
         fmt::format("n={} mean={:.6f} bias={:.6f} se={:.6f} z={:.3f} failures={} time={:.1f}s",
                     s.n, r.mean, r.bias, r.se, r.z, result.failures.size(), elapsed));
}

// 3. Null experiment repeated.
void null_control() {
  int within = 0;
  int reps = 0;
  std::string worst;
  double worst_ratio = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    harness::ExperimentPlan plan;
    plan.protocol = harness::ProtocolChoice::type2;
    plan.injected_dC_over_C = 0.0;
    plan.n_control = 20;
    plan.n_experimental = 20;
    plan.seed_base = 1 + 1000 * static_cast<std::uint64_t>(rep);
    const auto result = harness::run_batch(plan);
    ++reps;
    const auto& row = result.summary.rows.front();
    const double ratio = std::abs(row.dC_over_C_mean) / row.se;
    if (ratio <= 2.0) ++within;
    worst_ratio = std::max(worst_ratio, ratio);
  }
  report(3, "null control", within >= 18,
         fmt::format("{}/{} repetitions within 2 SE, worst |mean|/SE={:.2f}", within, reps,
                     worst_ratio));
}

// 4. Error budget fixture.
void budget() {
  const auto b = est::error_budget(0.001, 2.0, 0.0, 0.0, 1.0);
  const auto worst = est::error_budget(0.001, 2.0, 0.0005, 0.0, 1.0);
  const bool pass = b.dt_component == 0.0005 && worst.worst_case <= 0.001;
  report(4, "error budget fixture", pass,
         fmt::format("dt component={} worst case={} (sigma_k=0.0005)", b.dt_component,
                     worst.worst_case));
}

// 5. Steady-state detection on an exponential decay.
void steady_state() {
  TimeSeries s{0.0, 1.0, std::vector<double>(20000)};
  for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = 0.05 * std::exp(-s.time_at(i) / 600.0);
  const double oracle = 600.0 * std::log(0.05 * 60.0 / (1e-5 * 600.0));
  const auto t = signal::detect_steady_state(s, {});
  const bool pass = t && std::abs(*t - oracle) <= 600.0;
  report(5, "steady-state detection", pass,
         t ? fmt::format("detected {} s, oracle {:.1f} s", *t, oracle)
           : std::string("not detected"));
}

// 6. Fluctuation detection and false alarms.
double bump(double t, double start, double duration, double amplitude) {
  const double u = t - start;
  if (u < 0 || u > duration) return 0.0;
  const double z = (u - 0.5 * duration) / (duration / 4.0);
  const double edge = std::exp(-2.0);
  return amplitude * (std::exp(-0.5 * z * z) - edge) / (1.0 - edge);
}

TimeSeries white(double sigma, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  TimeSeries s{0.0, 1.0, std::vector<double>(n)};
  for (double& v : s.values) v = sigma * rng.normal();
  return s;
}

void fluctuations() {
  constexpr std::size_t day = 86400;
  constexpr double amp = 1.5e-3, dur = 1800.0;
  int hits = 0;
  double worst_amp = 0.0, worst_dur = 0.0;
  int false_total = 0, false_max = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto s = white(2e-4, day, 5000 + seed);
    const double start = 20000.0 + 500.0 * static_cast<double>(seed);
    for (std::size_t i = 0; i < s.size(); ++i) s.values[i] += bump(s.time_at(i), start, dur, amp);
    const auto events = signal::detect_fluctuations(s, {});
    if (events.size() == 1) {
      const auto& e = events[0];
      const double ea = std::abs(e.peak_amplitude - amp) / amp;
      const double ed = std::abs(e.duration - dur) / dur;
      worst_amp = std::max(worst_amp, ea);
      worst_dur = std::max(worst_dur, ed);
      if (e.polarity == 1 && ea <= 0.2 && ed <= 0.25) ++hits;
    }
    const auto clean = signal::detect_fluctuations(white(2e-4, day, 9000 + seed), {});
    false_total += static_cast<int>(clean.size());
    false_max = std::max(false_max, static_cast<int>(clean.size()));
  }
  report(6, "fluctuation detection", hits >= 95 && false_max <= 1,
         fmt::format("{}/100 detected within tolerance, worst amplitude error {:.1f}%, worst "
                     "duration error {:.1f}%, false alarms {} over 100 days (max {} per day)",
                     hits, 100 * worst_amp, 100 * worst_dur, false_total, false_max));
}

// 7. Lead/lag oracles.
void lead_lag() {
  constexpr double period = 86400.0, tau = 7200.0, dt = 60.0;
  const double w = 2.0 * std::numbers::pi / period;
  const std::size_t n = 6 * 1440 + 1;
  TimeSeries env{0.0, dt, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) env.values[i] = 21.0 + 0.15 * std::sin(w * env.time_at(i));

  // First-order channel driven by the environment, RK4 from rest.
  TimeSeries resp{0.0, dt, std::vector<double>(n)};
  const auto u = [&](double t) { return 0.15 * std::sin(w * t); };
  double y = 0.0;
  const int sub = 10;
  const double h = dt / sub;
  for (std::size_t i = 0; i < n; ++i) {
    resp.values[i] = y;
    for (int k = 0; k < sub; ++k) {
      const double t = env.time_at(i) + k * h;
      const double k1 = (u(t) - y) / tau;
      const double k2 = (u(t + h / 2) - (y + h / 2 * k1)) / tau;
      const double k3 = (u(t + h / 2) - (y + h / 2 * k2)) / tau;
      const double k4 = (u(t + h) - (y + h * k3)) / tau;
      y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  const double oracle = std::atan(w * tau) / w;
  const auto lags = signal::lead_lag(env, resp, 3 * 3600.0);
  double worst = 0.0;
  // The start-up transient decays within the first day.
  int used = 0;
  for (const auto& l : lags) {
    if (l.peak_time < period) continue;
    worst = std::max(worst, std::abs(l.lag - oracle));
    ++used;
  }

  TimeSeries shifted{0.0, dt, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) shifted.values[i] = 0.01 * std::sin(w * (shifted.time_at(i) - 3600.0));
  const auto shift_lags = signal::lead_lag(env, shifted, 3 * 3600.0);
  double worst_shift = 0.0;
  for (const auto& l : shift_lags) worst_shift = std::max(worst_shift, std::abs(l.lag - 3600.0));

  const bool pass = used > 0 && worst <= 300.0 && !shift_lags.empty() && worst_shift <= dt;
  report(7, "lead/lag", pass,
         fmt::format("oracle {:.1f} s, {} extrema, worst error {:.1f} s; shift 3600 s worst "
                     "error {} s",
                     oracle, used, worst, worst_shift));
}

// 8. Conservation and symmetry.
void conservation() {
  sim::CalorimeterConfig c;
  c.noise = sim::NoiseModel::noiseless();
  c.thermostat.control_accuracy = 0.0;
  c.mode = sim::Mode::passive;
  c.thermal_resistance_chamber_env = 1e30;
  c.initial_temps = {25.0, 19.0};
  c.initial_chamber_temp = 21.0;
  c.duration = 1e5;
  const auto h = sim::simulate_states(c, {});
  const sim::ThermalNetwork net(c, h.masses);
  const double e0 = net.energy({h.fluid_L.front(), h.fluid_R.front(), h.chamber.front()});
  double drift = 0.0;
  for (std::size_t i = 0; i < h.fluid_L.size(); ++i) {
    const double e = net.energy({h.fluid_L[i], h.fluid_R[i], h.chamber[i]});
    drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
  }

  sim::CalorimeterConfig sym;
  sym.thermostat.steps = {{0, 22}, {7200, 24}};
  sym.duration = 10800;
  sym.noise.sensor_white_sigma = 0.0;
  sym.noise.fill_error_sigma = 0.0;
  const auto t = sim::simulate_attempt(sym);
  const bool identical = t[Channel::fluid_L] == t[Channel::fluid_R];

  report(8, "simulator conservation and symmetry",
         h.rk4_steps >= 100000 && drift < 1e-9 && identical,
         fmt::format("{} RK4 steps, relative energy drift {:.3g}, symmetric channels {}",
                     h.rk4_steps, drift, identical ? "bit-identical" : "differ"));
}

// 9. Estimate properties.
void properties() {
  const auto mono = props::eq7_monotone(101, 10000);
  const auto recip = props::eq7_reciprocal(102, 10000, 1e-12);
  report(9, "estimate monotonicity and reciprocity", mono.pass && recip.pass,
         mono.detail + "; " + recip.detail);
}

}  // namespace

int main() {
  const auto run = [](int id, const char* name, void (*fn)()) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, name, false, std::string("exception: ") + e.what());
    }
  };
  run(1, "point reproduction at column means", table_columns);
  run(2, "end-to-end recovery", recovery);
  run(3, "null control", null_control);
  run(4, "error budget fixture", budget);
  run(5, "steady-state detection", steady_state);
  run(6, "fluctuation detection", fluctuations);
  run(7, "lead/lag", lead_lag);
  run(8, "simulator conservation and symmetry", conservation);
  run(9, "estimate monotonicity and reciprocity", properties);
  return failures == 0 ? 0 : 1;
}
