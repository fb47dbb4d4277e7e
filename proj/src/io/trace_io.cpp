#include "diffcal/io/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "diffcal/error.hpp"

namespace diffcal::io {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_number(std::string_view text, std::size_t line_no) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::malformed_trace,
                fmt::format("line {}: '{}' is not a number", line_no, text));
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::non_finite,
                fmt::format("line {}: non-finite value '{}'", line_no, text));
  }
  return value;
}

double header_field(std::string_view header, std::string_view key) {
  for (std::string_view token : split(header, ' ')) {
    if (token.starts_with(key) && token.size() > key.size() &&
        token[key.size()] == '=') {
      return parse_number(token.substr(key.size() + 1), 1);
    }
  }
  throw Error(ErrorCode::malformed_trace,
              fmt::format("line 1: header lacks '{}='", key));
}

}  // namespace

std::string format_fixed6(double value) {
  std::string s = fmt::format("{:.6f}", value);
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

void write_trace(const MultiChannelTrace& trace, std::ostream& out) {
  trace.validate();
  out << fmt::format("# diffcal-trace v{} period={} start={}\n",
                     kTraceFormatVersion, trace.sample_period, trace.start_time)
      << kTraceColumns << '\n';
  std::string row;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    row = format_fixed6(trace.time_at(i));
    for (const auto& ch : trace.channels) {
      row += ',';
      row += format_fixed6(ch[i]);
    }
    row += '\n';
    out << row;
  }
  if (!out) throw Error(ErrorCode::io_failure, "failed writing trace");
}

void write_trace(const MultiChannelTrace& trace,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::io_failure,
                fmt::format("cannot open '{}' for writing", path.string()));
  }
  write_trace(trace, out);
}

MultiChannelTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::malformed_trace, "empty trace file");
  }
  const std::string_view header = trim(line);
  const std::string magic = fmt::format("# diffcal-trace v{} ", kTraceFormatVersion);
  if (!header.starts_with(magic)) {
    throw Error(ErrorCode::malformed_trace,
                "line 1: expected '# diffcal-trace v1 period=<s> start=<s>'");
  }
  MultiChannelTrace trace;
  trace.sample_period = header_field(header, "period");
  trace.start_time = header_field(header, "start");
  if (!(trace.sample_period > 0.0)) {
    throw Error(ErrorCode::malformed_trace, "line 1: period must be positive");
  }

  if (!std::getline(in, line) || trim(line) != kTraceColumns) {
    throw Error(ErrorCode::malformed_trace,
                fmt::format("line 2: expected column header '{}'", kTraceColumns));
  }

  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, ',');
    if (fields.size() != kChannelCount + 1) {
      throw Error(ErrorCode::ragged_row,
                  fmt::format("line {}: expected {} fields, found {}", line_no,
                              kChannelCount + 1, fields.size()));
    }
    const double t = parse_number(fields[0], line_no);
    const double expected = trace.time_at(trace.size());
    if (std::abs(t - expected) > 1e-6 * std::max(1.0, std::abs(expected)) + 5e-7) {
      throw Error(ErrorCode::malformed_trace,
                  fmt::format("line {}: time {} does not follow the sample grid "
                              "(expected {})",
                              line_no, fields[0], format_fixed6(expected)));
    }
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      trace.channels[c].push_back(parse_number(fields[c + 1], line_no));
    }
  }
  if (trace.size() < 2) {
    throw Error(ErrorCode::malformed_trace, "trace needs at least 2 samples");
  }
  return trace;
}

MultiChannelTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_failure,
                fmt::format("cannot open '{}'", path.string()));
  }
  return read_trace(in);
}

}  // namespace diffcal::io
