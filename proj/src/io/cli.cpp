#include "diffcal/io/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "diffcal/error.hpp"
#include "diffcal/estimator/estimator.hpp"
#include "diffcal/harness/harness.hpp"
#include "diffcal/io/report.hpp"
#include "diffcal/io/run_config.hpp"
#include "diffcal/io/svg.hpp"
#include "diffcal/io/trace_io.hpp"
#include "diffcal/signal/fluctuations.hpp"
#include "diffcal/signal/lead_lag.hpp"
#include "diffcal/signal/trend.hpp"
#include "diffcal/sim/simulator.hpp"

namespace diffcal::cli {

namespace {

struct UsageError {
  std::string message;
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, next - pos);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() ||
        !std::isfinite(v)) {
      throw UsageError{fmt::format("{}: '{}' is not a number", flag, item)};
    }
    out.push_back(v);
    pos = next + 1;
  }
  return out;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("DIFFCAL_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string_view s(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError{fmt::format("DIFFCAL_SEED='{}' is not a non-negative integer", s)};
  }
  return v;
}

/// Flag, then DIFFCAL_SEED, then whatever the config holds.
void apply_seed(const std::optional<std::uint64_t>& flag, std::uint64_t& target) {
  if (flag) {
    target = *flag;
  } else if (auto e = env_seed()) {
    target = *e;
  }
}

io::RunConfig config_or_default(const std::string& path) {
  io::RunConfig cfg;
  if (!path.empty()) cfg = io::load_run_config(path);
  return cfg;
}

TimeSeries pick_series(const MultiChannelTrace& trace, const std::string& name) {
  if (name == "diff") return trace.differential();
  if (const auto c = parse_channel(name)) return trace.series(*c);
  throw UsageError{fmt::format(
      "unknown channel '{}' (expected diff, fluid_L, fluid_R, air_1, air_2 or env)",
      name)};
}

void emit(std::ostream& out, const std::string& text, const std::string& path) {
  out << text;
  if (!path.empty()) {
    std::ofstream f(path);
    if (!f || !(f << text)) {
      throw Error(ErrorCode::io_failure, fmt::format("cannot write '{}'", path));
    }
  }
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> injected;
  std::optional<double> duration;
  std::string out;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  io::RunConfig cfg = config_or_default(a.config);
  apply_seed(a.seed, cfg.calorimeter.noise.rng_seed);
  if (a.injected) cfg.calorimeter.dC_over_C_injected = *a.injected;
  if (a.duration) cfg.calorimeter.duration = *a.duration;
  const MultiChannelTrace trace = sim::simulate_attempt(cfg.calorimeter, cfg.events);
  if (a.out.empty()) {
    io::write_trace(trace, out);
  } else {
    io::write_trace(trace, std::filesystem::path(a.out));
  }
  return kExitOk;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string trace;
  std::string protocol;
  std::string marks = "30,45,60";
  double k = 1.0;
  std::vector<std::string> controls;
  std::optional<double> step_time;
  std::optional<double> begin_tolerance;
  double sigma_dt = 0.0;
  double sigma_k = 0.0;
  std::string config;
  std::string out;
};

est::AttemptRecord extract(const MultiChannelTrace& trace, double step,
                           est::Protocol protocol,
                           const std::vector<double>& offsets,
                           const io::RunConfig& cfg, const AnalyzeArgs& a,
                           est::AttemptKind kind) {
  if (protocol == est::Protocol::type1) {
    est::Type1Options opt = cfg.plan.type1;
    if (a.begin_tolerance) opt.begin_tolerance = *a.begin_tolerance;
    opt.kind = kind;
    opt.k = a.k;
    return est::extract_type1(trace, step, offsets, opt);
  }
  est::Type2Options opt = cfg.plan.type2;
  opt.kind = kind;
  opt.k = a.k;
  return est::extract_type2(trace, step, opt);
}

int do_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  est::Protocol protocol;
  if (a.protocol == "type1") protocol = est::Protocol::type1;
  else if (a.protocol == "type2") protocol = est::Protocol::type2;
  else throw UsageError{"--protocol must be type1 or type2"};
  std::vector<double> offsets;
  for (double m : parse_list(a.marks, "--marks")) offsets.push_back(m * 60.0);
  if (!(a.k > 0.0)) throw UsageError{"--k must be positive"};

  const io::RunConfig cfg = config_or_default(a.config);
  const MultiChannelTrace trace = io::read_trace(std::filesystem::path(a.trace));
  double step = 0.0;
  if (a.step_time) {
    step = *a.step_time;
  } else {
    step = est::infer_step_time(trace);
    err << fmt::format("note: inferred step time {} s\n", io::format_number(step));
  }
  const est::AttemptRecord rec =
      extract(trace, step, protocol, offsets, cfg, a, est::AttemptKind::experimental);

  std::vector<std::vector<double>> control_dt(rec.marks.size());
  for (const auto& path : a.controls) {
    const MultiChannelTrace ct = io::read_trace(std::filesystem::path(path));
    const double cstep = a.step_time ? *a.step_time : est::infer_step_time(ct);
    const est::AttemptRecord crec =
        extract(ct, cstep, protocol, offsets, cfg, a, est::AttemptKind::control);
    for (std::size_t j = 0; j < rec.marks.size(); ++j) {
      control_dt[j].push_back(crec.marks[j].dt);
    }
  }

  std::string csv =
      "protocol,mark,step_time_s,T_begin_L,T_begin_R,T_end_L,T_end_R,dt_raw,"
      "dt_control_mean,dt,delta_T_control,k,dC_over_C,sigma,calibrated\n";
  for (std::size_t j = 0; j < rec.marks.size(); ++j) {
    const est::Mark& m = rec.marks[j];
    const bool calibrated = !control_dt[j].empty();
    const double control_mean = calibrated ? mean_of(control_dt[j]) : 0.0;
    const double dt = calibrated ? est::calibrate_dt(m.dt, control_dt[j]) : m.dt;
    const est::HeatCapacityEstimate e = est::estimate_dC_over_C(
        dt, m.delta_T_control, a.k,
        {protocol, m.label, calibrated, a.sigma_dt, a.sigma_k});
    csv += fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        est::protocol_name(protocol), m.label, io::format_number(step),
        io::format_number(rec.T_begin_L), io::format_number(rec.T_begin_R),
        io::format_number(m.T_end_L), io::format_number(m.T_end_R),
        io::format_number(m.dt), io::format_number(control_mean),
        io::format_number(dt), io::format_number(m.delta_T_control),
        io::format_number(a.k), io::format_number(e.value),
        io::format_number(e.sigma), calibrated ? "true" : "false");
  }
  emit(out, csv, a.out);
  return kExitOk;
}

// ---- detect -----------------------------------------------------------------

struct DetectArgs {
  std::string trace;
  std::string detrend = "linear";
  std::string channel = "diff";
  std::optional<double> from, to;
  std::string noise_window;
  std::optional<double> threshold_factor, smoothing, merge_gap, min_duration,
      max_duration;
  std::string growth;
  std::string config;
  std::string out;
};

int do_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  const signal::TrendSpec spec = [&] {
    try {
      return signal::TrendSpec::parse(a.detrend);
    } catch (const Error& e) {
      throw UsageError{e.what()};
    }
  }();
  const io::RunConfig cfg = config_or_default(a.config);
  signal::DetectorOptions opt = cfg.detector;
  if (a.threshold_factor) opt.threshold_factor = *a.threshold_factor;
  if (a.smoothing) opt.smoothing = *a.smoothing;
  if (a.merge_gap) opt.merge_gap = *a.merge_gap;
  if (a.min_duration) opt.min_duration = *a.min_duration;
  if (a.max_duration) opt.max_duration = *a.max_duration;

  const MultiChannelTrace trace = io::read_trace(std::filesystem::path(a.trace));
  TimeSeries series = pick_series(trace, a.channel);
  if (a.from || a.to) {
    const double t0 = a.from.value_or(series.start);
    const double t1 = a.to.value_or(series.end_time());
    const IndexRange r = series.range(t0, t1, true);
    if (r.size() < 2) {
      throw Error(ErrorCode::degenerate_window, "--from/--to select fewer than 2 samples");
    }
    series = series.slice(r);
  }
  if (!a.noise_window.empty()) {
    const auto w = parse_list(a.noise_window, "--noise-window");
    if (w.size() != 2) throw UsageError{"--noise-window expects begin,end"};
    opt.noise_window = {w[0], w[1]};
  } else if (a.config.empty()) {
    const double len = opt.noise_window.length();
    opt.noise_window = {series.start, series.start + len};
  }

  signal::TrendModel model;
  try {
    model = signal::fit_trend(series, spec);
  } catch (const signal::NonConvergenceError& e) {
    model = e.best();
    err << "warning: " << one_line(e.what()) << "; using the best parameters found\n";
  }
  const TimeSeries residual = signal::detrend(series, model);
  const auto events = signal::detect_fluctuations(residual, opt, a.channel);

  std::string params;
  for (double p : model.params) {
    if (!params.empty()) params += ';';
    params += io::format_number(p);
  }
  std::string csv = fmt::format("# trend kind={} params={} rms={}\n", spec.label(),
                                params, io::format_number(model.rms_residual));
  if (!a.growth.empty()) {
    const auto g = parse_list(a.growth, "--growth");
    if (g.size() != 4) throw UsageError{"--growth expects a0,a1,b0,b1"};
    const double ratio =
        signal::fluctuation_growth(residual, {g[0], g[1]}, {g[2], g[3]});
    csv += fmt::format("# growth ratio={}\n", io::format_number(ratio));
  }
  csv += io::events_csv(events);
  emit(out, csv, a.out);
  return kExitOk;
}

// ---- batch ------------------------------------------------------------------

struct BatchArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_control, n_experimental;
  std::string protocol;
  std::optional<double> injected;
  std::optional<unsigned> threads;
  std::optional<double> truth;
  std::string out_summary, out_recovery, out_failures;
};

int do_batch(const BatchArgs& a, std::ostream& out, std::ostream& err) {
  io::RunConfig cfg = config_or_default(a.config);
  harness::ExperimentPlan plan = cfg.plan;
  apply_seed(a.seed, plan.seed_base);
  if (a.n_control) plan.n_control = *a.n_control;
  if (a.n_experimental) plan.n_experimental = *a.n_experimental;
  if (!a.protocol.empty()) {
    try {
      plan.protocol = harness::parse_protocol_choice(a.protocol);
    } catch (const Error& e) {
      throw UsageError{e.what()};
    }
  }
  if (a.injected) plan.injected_dC_over_C = *a.injected;
  if (a.threads) plan.threads = *a.threads;

  const harness::BatchResult result = harness::run_batch(plan);
  if (!result.failures.empty()) {
    err << fmt::format("warning: {} attempt extraction(s) failed\n",
                       result.failures.size());
  }
  if (!a.out_failures.empty()) {
    std::ostringstream sink;
    emit(sink, io::failures_csv(result.failures), a.out_failures);
  }
  emit(out, io::summary_csv(result.summary), a.out_summary);
  if (a.truth) {
    const auto rows = harness::recovery_report(*a.truth, result.summary);
    out << '\n';
    emit(out, io::recovery_csv(rows), a.out_recovery);
  }
  return kExitOk;
}

// ---- leadlag ----------------------------------------------------------------

struct LeadLagArgs {
  std::string trace;
  double max_lag = 0.0;
  std::string channel = "diff";
  std::string env_channel = "env";
  std::optional<double> smoothing;
  std::optional<double> min_correlation;
  std::string out;
};

int do_leadlag(const LeadLagArgs& a, std::ostream& out) {
  const MultiChannelTrace trace = io::read_trace(std::filesystem::path(a.trace));
  signal::LeadLagOptions opt;
  if (a.smoothing) opt.smoothing = *a.smoothing;
  if (a.min_correlation) opt.min_correlation = *a.min_correlation;
  const auto lags = signal::lead_lag(pick_series(trace, a.env_channel),
                                     pick_series(trace, a.channel), a.max_lag, opt);
  emit(out, io::lags_csv(lags), a.out);
  return kExitOk;
}

// ---- plot -------------------------------------------------------------------

struct PlotArgs {
  std::string trace;
  std::string out;
  std::string channels = "fluid_L,fluid_R,diff";
  std::string title;
};

int do_plot(const PlotArgs& a, std::ostream& out) {
  const MultiChannelTrace trace = io::read_trace(std::filesystem::path(a.trace));
  std::vector<io::PlotSeries> series;
  std::size_t pos = 0;
  while (pos <= a.channels.size()) {
    const std::size_t next = std::min(a.channels.find(',', pos), a.channels.size());
    const std::string name = a.channels.substr(pos, next - pos);
    series.push_back({name, pick_series(trace, name)});
    pos = next + 1;
  }
  io::SvgOptions opt;
  opt.title = a.title.empty() ? a.trace : a.title;
  const std::string svg = io::render_svg(series, opt);
  std::ofstream f(a.out);
  if (!f || !(f << svg)) {
    throw Error(ErrorCode::io_failure, fmt::format("cannot write '{}'", a.out));
  }
  out << fmt::format("wrote {} ({} panels)\n", a.out, series.size());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"diffcal: differential calorimeter simulator and dC/C estimator",
               "diffcal"};
  app.require_subcommand(1);

  SimulateArgs sim_a;
  auto* sim_cmd = app.add_subcommand("simulate", "simulate one attempt to a trace CSV");
  sim_cmd->add_option("--config", sim_a.config, "run configuration file");
  sim_cmd->add_option("--seed", sim_a.seed, "noise seed (default: DIFFCAL_SEED, then config)");
  sim_cmd->add_option("--injected", sim_a.injected, "dC/C applied to fluid_L");
  sim_cmd->add_option("--duration", sim_a.duration, "simulated seconds");
  sim_cmd->add_option("--out", sim_a.out, "trace file (default: stdout)");

  AnalyzeArgs an_a;
  auto* an_cmd = app.add_subcommand("analyze", "extract dt and estimate dC/C from a trace");
  an_cmd->add_option("--trace", an_a.trace, "trace CSV")->required();
  an_cmd->add_option("--protocol", an_a.protocol, "type1 or type2")->required();
  an_cmd->add_option("--marks", an_a.marks, "type-1 marks, minutes after the step");
  an_cmd->add_option("--k", an_a.k, "mass ratio m_R/m_L");
  an_cmd->add_option("--controls", an_a.controls, "control traces for zero-level calibration");
  an_cmd->add_option("--step-time", an_a.step_time, "second setpoint time (s); inferred if absent");
  an_cmd->add_option("--begin-tolerance", an_a.begin_tolerance, "type-1 begin tolerance (C)");
  an_cmd->add_option("--sigma-dt", an_a.sigma_dt, "dt uncertainty for the reported sigma (C)");
  an_cmd->add_option("--sigma-k", an_a.sigma_k, "k uncertainty for the reported sigma");
  an_cmd->add_option("--config", an_a.config, "run configuration (steady/plan windows)");
  an_cmd->add_option("--out", an_a.out, "also write the CSV here");

  DetectArgs de_a;
  auto* de_cmd = app.add_subcommand("detect", "detrend a channel and detect fluctuation events");
  de_cmd->add_option("--trace", de_a.trace, "trace CSV")->required();
  de_cmd->add_option("--detrend", de_a.detrend, "linear, poly:D or exp");
  de_cmd->add_option("--channel", de_a.channel, "diff, fluid_L, fluid_R, air_1, air_2 or env");
  de_cmd->add_option("--from", de_a.from, "analysis start (s)");
  de_cmd->add_option("--to", de_a.to, "analysis end (s)");
  de_cmd->add_option("--noise-window", de_a.noise_window, "begin,end (s) of the noise window");
  de_cmd->add_option("--threshold-factor", de_a.threshold_factor, "threshold in robust sigmas");
  de_cmd->add_option("--smoothing", de_a.smoothing, "moving-average length (s)");
  de_cmd->add_option("--merge-gap", de_a.merge_gap, "merge events closer than this (s)");
  de_cmd->add_option("--min-duration", de_a.min_duration, "shortest kept event (s)");
  de_cmd->add_option("--max-duration", de_a.max_duration, "longest kept event (s)");
  de_cmd->add_option("--growth", de_a.growth, "a0,a1,b0,b1: RMS ratio of window b over a");
  de_cmd->add_option("--config", de_a.config, "run configuration (detector section)");
  de_cmd->add_option("--out", de_a.out, "also write the CSV here");

  BatchArgs ba_a;
  auto* ba_cmd = app.add_subcommand("batch", "run a control/experimental batch");
  ba_cmd->add_option("--config", ba_a.config, "run configuration file");
  ba_cmd->add_option("--seed", ba_a.seed, "seed base (default: DIFFCAL_SEED, then config)");
  ba_cmd->add_option("--n-control", ba_a.n_control, "control attempts");
  ba_cmd->add_option("--n-experimental", ba_a.n_experimental, "experimental attempts");
  ba_cmd->add_option("--protocol", ba_a.protocol, "type1, type2 or both");
  ba_cmd->add_option("--injected", ba_a.injected, "injected dC/C");
  ba_cmd->add_option("--threads", ba_a.threads, "worker threads (0 = all cores)");
  ba_cmd->add_option("--truth", ba_a.truth, "known dC/C: append a recovery report");
  ba_cmd->add_option("--out-summary", ba_a.out_summary, "also write the summary CSV here");
  ba_cmd->add_option("--out-recovery", ba_a.out_recovery, "also write the recovery CSV here");
  ba_cmd->add_option("--out-failures", ba_a.out_failures, "write per-attempt failures here");

  LeadLagArgs ll_a;
  auto* ll_cmd = app.add_subcommand("leadlag", "lag of a channel behind environmental extrema");
  ll_cmd->add_option("--trace", ll_a.trace, "trace CSV")->required();
  ll_cmd->add_option("--max-lag", ll_a.max_lag, "largest lag searched (s)")->required();
  ll_cmd->add_option("--channel", ll_a.channel, "responding series (default diff)");
  ll_cmd->add_option("--env-channel", ll_a.env_channel, "driving series (default env)");
  ll_cmd->add_option("--smoothing", ll_a.smoothing, "extremum smoothing (s)");
  ll_cmd->add_option("--min-correlation", ll_a.min_correlation, "reliability threshold");
  ll_cmd->add_option("--out", ll_a.out, "also write the CSV here");

  PlotArgs pl_a;
  auto* pl_cmd = app.add_subcommand("plot", "SVG chart of trace channels");
  pl_cmd->add_option("--trace", pl_a.trace, "trace CSV")->required();
  pl_cmd->add_option("--out", pl_a.out, "SVG file")->required();
  pl_cmd->add_option("--channels", pl_a.channels, "comma-separated, e.g. fluid_L,fluid_R,diff");
  pl_cmd->add_option("--title", pl_a.title, "chart title");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) return do_simulate(sim_a, out);
    if (an_cmd->parsed()) return do_analyze(an_a, out, err);
    if (de_cmd->parsed()) return do_detect(de_a, out, err);
    if (ba_cmd->parsed()) return do_batch(ba_a, out, err);
    if (ll_cmd->parsed()) return do_leadlag(ll_a, out);
    if (pl_cmd->parsed()) return do_plot(pl_a, out);
  } catch (const UsageError& e) {
    err << "error[usage]: " << one_line(e.message) << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error[" << code_name(e.code()) << "]: " << one_line(e.what()) << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error[internal]: " << one_line(e.what()) << '\n';
    return kExitDataError;
  }
  err << "error[usage]: no subcommand\n";
  return kExitUsage;
}

}  // namespace diffcal::cli
