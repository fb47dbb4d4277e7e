#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "diffcal/harness/harness.hpp"
#include "diffcal/signal/fluctuations.hpp"
#include "diffcal/signal/steady_state.hpp"
#include "diffcal/sim/config.hpp"

namespace diffcal::io {

/// Everything a config file can set. `plan.base_config` is kept equal to
/// `calorimeter` by the loaders.
struct RunConfig {
  sim::CalorimeterConfig calorimeter;
  std::vector<sim::FluctuationEventSpec> events;
  harness::ExperimentPlan plan;
  signal::SteadyStateCriterion steady;
  signal::DetectorOptions detector;
};

/// Line-oriented `section.key = value` text with `#` comments. Unknown or
/// repeated keys and unparsable values throw Error(invalid_config) naming
/// the source and line. Events are `event.<name>.<field>`, kept in order of
/// first appearance.
RunConfig parse_run_config(std::istream& in,
                           const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Every accepted key except the per-event ones, one per line.
std::vector<std::string> run_config_keys();

}  // namespace diffcal::io
