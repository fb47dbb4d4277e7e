#pragma once

#include <span>
#include <string>

#include "diffcal/series.hpp"

namespace diffcal::io {

struct PlotSeries {
  std::string name;
  TimeSeries series;
};

struct SvgOptions {
  int width = 960;          // px
  int panel_height = 220;   // px per series
  std::size_t max_points = 2000;  // per polyline, min/max decimated beyond
  std::string title;
};

/// Static SVG 1.1 chart: one panel per series, each with its own y range,
/// sharing the time axis.
std::string render_svg(std::span<const PlotSeries> series,
                       const SvgOptions& options = {});

}  // namespace diffcal::io
