#include "diffcal/io/report.hpp"

#include <fmt/format.h>

#include "diffcal/io/trace_io.hpp"

namespace diffcal::io {

std::string format_number(double value) {
  if (value == 0.0) return "0";
  return fmt::format("{}", value);
}

std::string summary_csv(const harness::SummaryTable& summary) {
  std::string out =
      "profile,protocol,mark,time_after_excitation,n,n_control,"
      "delta_T_mean,delta_T_sd,dt_mean,dt_sd,dt_se,dC_over_C_mean,dC_over_C_sd,"
      "dC_over_C_se\n";
  for (const auto& r : summary.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                       summary.profile_label, est::protocol_name(r.protocol),
                       r.mark, r.time_after_excitation, r.n, r.n_control,
                       format_number(r.delta_T_mean), format_number(r.delta_T_sd),
                       format_number(r.dt_mean), format_number(r.dt_sd),
                       format_number(r.dt_se),
                       format_number(r.dC_over_C_mean),
                       format_number(r.dC_over_C_sd), format_number(r.se));
  }
  return out;
}

std::string recovery_csv(std::span<const harness::RecoveryRow> rows) {
  std::string out = "protocol,mark,mean,bias,se,z,pass\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", est::protocol_name(r.protocol),
                       r.mark, format_number(r.mean), format_number(r.bias),
                       format_number(r.se), format_number(r.z),
                       r.pass ? "true" : "false");
  }
  return out;
}

std::string failures_csv(std::span<const harness::AttemptFailure> failures) {
  std::string out = "kind,protocol,index,seed,code,message\n";
  for (const auto& f : failures) {
    std::string message = f.message;
    for (char& c : message) {
      if (c == ',' || c == '\n') c = ';';
    }
    out += fmt::format("{},{},{},{},{},{}\n", est::kind_name(f.kind),
                       est::protocol_name(f.protocol), f.index, f.seed,
                       code_name(f.code), message);
  }
  return out;
}

std::string events_csv(std::span<const signal::FluctuationEvent> events) {
  std::string out =
      "channel,start_s,duration_s,peak_time_s,peak_amplitude_C,polarity\n";
  for (const auto& e : events) {
    out += fmt::format("{},{},{},{},{},{}\n", e.channel, format_fixed6(e.start),
                       format_fixed6(e.duration), format_fixed6(e.peak_time),
                       format_number(e.peak_amplitude), e.polarity);
  }
  return out;
}

std::string lags_csv(std::span<const signal::LagEstimate> lags) {
  std::string out = "peak_time_s,extremum,lag_s,correlation,reliable\n";
  for (const auto& l : lags) {
    out += fmt::format("{},{},{},{},{}\n", format_fixed6(l.peak_time),
                       l.extremum > 0 ? "max" : "min", format_fixed6(l.lag),
                       format_number(l.correlation),
                       l.reliable ? "true" : "false");
  }
  return out;
}

}  // namespace diffcal::io
