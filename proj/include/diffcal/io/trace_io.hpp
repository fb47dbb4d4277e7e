#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "diffcal/trace.hpp"

namespace diffcal::io {

inline constexpr int kTraceFormatVersion = 1;
inline constexpr const char* kTraceColumns =
    "time_s,fluid_L_C,fluid_R_C,air_1_C,air_2_C,env_C";

/// Fixed 6-decimal text of a temperature; negative zero prints as 0.
std::string format_fixed6(double value);

/// CSV trace: `# diffcal-trace v1 period=<s> start=<s>`, the column header,
/// then one row per sample.
void write_trace(const MultiChannelTrace& trace, std::ostream& out);
void write_trace(const MultiChannelTrace& trace,
                 const std::filesystem::path& path);

/// Throws Error with malformed_trace (header, time column), ragged_row
/// (wrong field count) or non_finite.
MultiChannelTrace read_trace(std::istream& in);
MultiChannelTrace read_trace(const std::filesystem::path& path);

}  // namespace diffcal::io
