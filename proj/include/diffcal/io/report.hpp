#pragma once

#include <span>
#include <string>
#include <vector>

#include "diffcal/harness/harness.hpp"
#include "diffcal/signal/fluctuations.hpp"
#include "diffcal/signal/lead_lag.hpp"

namespace diffcal::io {

/// CSV renderings with fixed columns and locale-independent numbers.
std::string summary_csv(const harness::SummaryTable& summary);
std::string recovery_csv(std::span<const harness::RecoveryRow> rows);
std::string failures_csv(std::span<const harness::AttemptFailure> failures);
std::string events_csv(std::span<const signal::FluctuationEvent> events);
std::string lags_csv(std::span<const signal::LagEstimate> lags);

/// Shortest text that reads back to the same double.
std::string format_number(double value);

}  // namespace diffcal::io
