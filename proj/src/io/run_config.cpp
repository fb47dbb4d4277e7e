#include "diffcal/io/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <string_view>

#include <fmt/format.h>

#include "diffcal/error.hpp"

namespace diffcal::io {

namespace {

using Setter = std::function<void(RunConfig&, std::string_view)>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_list(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

// Value errors carry no location; the caller adds it.
struct BadValue {
  std::string message;
};

double to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    throw BadValue{fmt::format("'{}' is not a finite number", s)};
  }
  return v;
}

long long to_integer(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw BadValue{fmt::format("'{}' is not an integer", s)};
  }
  return v;
}

std::vector<double> to_doubles(std::string_view s) {
  std::vector<double> out;
  for (auto item : split_list(s, ',')) out.push_back(to_double(item));
  return out;
}

Setter number(double sim::CalorimeterConfig::*field) {
  return [field](RunConfig& c, std::string_view v) { c.calorimeter.*field = to_double(v); };
}

template <class Get>
Setter number_at(Get get) {
  return [get](RunConfig& c, std::string_view v) { get(c) = to_double(v); };
}

std::map<std::string, Setter, std::less<>> build_setters() {
  using sim::CalorimeterConfig;
  std::map<std::string, Setter, std::less<>> s;

  s["calorimeter.mode"] = [](RunConfig& c, std::string_view v) {
    if (v == "active") c.calorimeter.mode = sim::Mode::active;
    else if (v == "passive") c.calorimeter.mode = sim::Mode::passive;
    else throw BadValue{"expected active or passive"};
  };
  s["calorimeter.heat_distribution"] = [](RunConfig& c, std::string_view v) {
    if (v == "equal_split") c.calorimeter.heat_distribution = sim::HeatDistribution::equal_split;
    else if (v == "per_channel") c.calorimeter.heat_distribution = sim::HeatDistribution::per_channel;
    else throw BadValue{"expected equal_split or per_channel"};
  };
  s["calorimeter.sample_mass_L"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.sample_mass.L; });
  s["calorimeter.sample_mass_R"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.sample_mass.R; });
  s["calorimeter.specific_heat_base"] = number(&CalorimeterConfig::specific_heat_base);
  s["calorimeter.dC_over_C_injected"] = number(&CalorimeterConfig::dC_over_C_injected);
  s["calorimeter.container_heat_capacity_L"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.container_heat_capacity.L; });
  s["calorimeter.container_heat_capacity_R"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.container_heat_capacity.R; });
  s["calorimeter.thermal_resistance_sample_chamber_L"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.thermal_resistance_sample_chamber.L; });
  s["calorimeter.thermal_resistance_sample_chamber_R"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.thermal_resistance_sample_chamber.R; });
  s["calorimeter.thermal_resistance_channel_leak"] = number(&CalorimeterConfig::thermal_resistance_channel_leak);
  s["calorimeter.thermal_resistance_chamber_env"] = number(&CalorimeterConfig::thermal_resistance_chamber_env);
  s["calorimeter.chamber_heat_capacity"] = number(&CalorimeterConfig::chamber_heat_capacity);
  s["calorimeter.initial_temp_L"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.initial_temps.L; });
  s["calorimeter.initial_temp_R"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.initial_temps.R; });
  s["calorimeter.initial_chamber_temp"] = [](RunConfig& c, std::string_view v) {
    c.calorimeter.initial_chamber_temp = to_double(v);
  };
  s["calorimeter.sample_period"] = number(&CalorimeterConfig::sample_period);
  s["calorimeter.duration"] = number(&CalorimeterConfig::duration);
  s["calorimeter.integration_step"] = number(&CalorimeterConfig::integration_step);

  s["thermostat.steps"] = [](RunConfig& c, std::string_view v) {
    std::vector<sim::ThermostatStep> steps;
    for (auto item : split_list(v, ',')) {
      const auto parts = split_list(item, ':');
      if (parts.size() != 2) throw BadValue{"expected time:setpoint pairs, e.g. 0:22, 1800:24"};
      steps.push_back({to_double(parts[0]), to_double(parts[1])});
    }
    c.calorimeter.thermostat.steps = std::move(steps);
  };
  s["thermostat.tracking_time_constant"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.thermostat.tracking_time_constant; });
  s["thermostat.control_accuracy"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.thermostat.control_accuracy; });
  s["thermostat.noise_correlation_time"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.thermostat.noise_correlation_time; });

  s["environment.mean_temp"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.environment.mean_temp; });
  s["environment.circadian_amplitude"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.environment.circadian_amplitude; });
  s["environment.circadian_period"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.environment.circadian_period; });
  s["environment.slow_drift_rate"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.environment.slow_drift_rate; });

  s["noise.sensor_white_sigma"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.noise.sensor_white_sigma; });
  s["noise.quantization_step"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.noise.quantization_step; });
  s["noise.fill_error_sigma"] = number_at([](RunConfig& c) -> double& { return c.calorimeter.noise.fill_error_sigma; });
  s["noise.rng_seed"] = [](RunConfig& c, std::string_view v) {
    const long long seed = to_integer(v);
    if (seed < 0) throw BadValue{"seed must be non-negative"};
    c.calorimeter.noise.rng_seed = static_cast<std::uint64_t>(seed);
  };

  s["plan.profile_label"] = [](RunConfig& c, std::string_view v) { c.plan.profile_label = std::string(v); };
  s["plan.n_control"] = [](RunConfig& c, std::string_view v) { c.plan.n_control = static_cast<int>(to_integer(v)); };
  s["plan.n_experimental"] = [](RunConfig& c, std::string_view v) { c.plan.n_experimental = static_cast<int>(to_integer(v)); };
  s["plan.injected_dC_over_C"] = number_at([](RunConfig& c) -> double& { return c.plan.injected_dC_over_C; });
  s["plan.protocol"] = [](RunConfig& c, std::string_view v) {
    try {
      c.plan.protocol = harness::parse_protocol_choice(v);
    } catch (const Error& e) {
      throw BadValue{e.what()};
    }
  };
  s["plan.mark_offsets"] = [](RunConfig& c, std::string_view v) { c.plan.mark_offsets = to_doubles(v); };
  s["plan.seed_base"] = [](RunConfig& c, std::string_view v) {
    const long long seed = to_integer(v);
    if (seed < 0) throw BadValue{"seed must be non-negative"};
    c.plan.seed_base = static_cast<std::uint64_t>(seed);
  };
  s["plan.step_time"] = [](RunConfig& c, std::string_view v) { c.plan.step_time = to_double(v); };
  s["plan.handling_time"] = number_at([](RunConfig& c) -> double& { return c.plan.handling_time; });
  s["plan.initial_offset_L"] = number_at([](RunConfig& c) -> double& { return c.plan.experimental_initial_offset.L; });
  s["plan.initial_offset_R"] = number_at([](RunConfig& c) -> double& { return c.plan.experimental_initial_offset.R; });
  s["plan.calibration"] = [](RunConfig& c, std::string_view v) {
    if (v == "control_mean") c.plan.calibration = harness::CalibrationMode::control_mean;
    else if (v == "paired") c.plan.calibration = harness::CalibrationMode::paired;
    else throw BadValue{"expected control_mean or paired"};
  };
  s["plan.threads"] = [](RunConfig& c, std::string_view v) {
    const long long n = to_integer(v);
    if (n < 0) throw BadValue{"threads must be non-negative"};
    c.plan.threads = static_cast<unsigned>(n);
  };
  s["plan.begin_tolerance"] = number_at([](RunConfig& c) -> double& { return c.plan.type1.begin_tolerance; });
  s["plan.begin_window"] = [](RunConfig& c, std::string_view v) {
    c.plan.type1.begin_window = c.plan.type2.begin_window = to_double(v);
  };
  s["plan.mark_half_window"] = number_at([](RunConfig& c) -> double& { return c.plan.type1.mark_half_window; });
  s["plan.zone4_window"] = number_at([](RunConfig& c) -> double& { return c.plan.type2.zone4_window; });

  s["steady.window"] = number_at([](RunConfig& c) -> double& { return c.steady.window; });
  s["steady.slope_threshold"] = number_at([](RunConfig& c) -> double& { return c.steady.slope_threshold; });
  s["steady.hold"] = [](RunConfig& c, std::string_view v) { c.steady.hold = static_cast<int>(to_integer(v)); };

  s["detector.noise_window"] = [](RunConfig& c, std::string_view v) {
    const auto w = to_doubles(v);
    if (w.size() != 2) throw BadValue{"expected begin,end in seconds"};
    c.detector.noise_window = {w[0], w[1]};
  };
  s["detector.threshold_factor"] = number_at([](RunConfig& c) -> double& { return c.detector.threshold_factor; });
  s["detector.smoothing"] = number_at([](RunConfig& c) -> double& { return c.detector.smoothing; });
  s["detector.merge_gap"] = number_at([](RunConfig& c) -> double& { return c.detector.merge_gap; });
  s["detector.min_duration"] = number_at([](RunConfig& c) -> double& { return c.detector.min_duration; });
  s["detector.max_duration"] = number_at([](RunConfig& c) -> double& { return c.detector.max_duration; });
  return s;
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const auto s = build_setters();
  return s;
}

void set_event_field(sim::FluctuationEventSpec& e, std::string_view field,
                     std::string_view v) {
  if (field == "channel") {
    if (v == "fluid_L") e.channel = Channel::fluid_L;
    else if (v == "fluid_R") e.channel = Channel::fluid_R;
    else throw BadValue{"event channel must be fluid_L or fluid_R"};
  } else if (field == "start") {
    e.start = to_double(v);
  } else if (field == "duration") {
    e.duration = to_double(v);
  } else if (field == "amplitude") {
    e.amplitude = to_double(v);
  } else if (field == "shape") {
    if (v == "gaussian_bump") e.shape = sim::EventShape::gaussian_bump;
    else if (v == "raised_cosine") e.shape = sim::EventShape::raised_cosine;
    else throw BadValue{"event shape must be gaussian_bump or raised_cosine"};
  } else {
    throw BadValue{fmt::format("unknown event field '{}'", field)};
  }
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::vector<std::string> event_names;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& message) {
    throw Error(ErrorCode::invalid_config,
                fmt::format("{}:{}: {}", source, line_no, message));
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) fail("expected 'section.key = value'");
    const std::string_view key = trim(body.substr(0, eq));
    const std::string_view value = trim(body.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      fail(fmt::format("key '{}' is set twice", key));
    }
    try {
      if (key.starts_with("event.")) {
        const std::string_view rest = key.substr(6);
        const auto dot = rest.find('.');
        if (dot == std::string_view::npos || dot == 0) {
          fail(fmt::format("expected event.<name>.<field>, got '{}'", key));
        }
        const std::string name(rest.substr(0, dot));
        auto it = std::find(event_names.begin(), event_names.end(), name);
        if (it == event_names.end()) {
          event_names.push_back(name);
          cfg.events.emplace_back();
          it = event_names.end() - 1;
        }
        set_event_field(cfg.events[static_cast<std::size_t>(it - event_names.begin())],
                        rest.substr(dot + 1), value);
        continue;
      }
      const auto setter = setters().find(key);
      if (setter == setters().end()) fail(fmt::format("unknown key '{}'", key));
      setter->second(cfg, value);
    } catch (const BadValue& bad) {
      fail(fmt::format("{}: {}", key, bad.message));
    }
  }
  cfg.plan.base_config = cfg.calorimeter;
  cfg.plan.type2.flatness = cfg.steady;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_failure,
                fmt::format("cannot open config '{}'", path.string()));
  }
  return parse_run_config(in, path.string());
}

std::vector<std::string> run_config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

}  // namespace diffcal::io
