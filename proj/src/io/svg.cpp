#include "diffcal/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "diffcal/error.hpp"

namespace diffcal::io {

namespace {

constexpr int kMarginLeft = 90;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kPanelGap = 30;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Sample indices to draw: all of them, or the min and max of each bucket.
std::vector<std::size_t> decimate(const std::vector<double>& v,
                                  std::size_t max_points) {
  std::vector<std::size_t> idx;
  const std::size_t n = v.size();
  if (n <= max_points || max_points < 4) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
  }
  const std::size_t buckets = max_points / 2;
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t lo = b * n / buckets;
    const std::size_t hi = (b + 1) * n / buckets;
    const auto [mn, mx] = std::minmax_element(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                              v.begin() + static_cast<std::ptrdiff_t>(hi));
    const auto a = static_cast<std::size_t>(mn - v.begin());
    const auto c = static_cast<std::size_t>(mx - v.begin());
    idx.push_back(std::min(a, c));
    if (a != c) idx.push_back(std::max(a, c));
  }
  return idx;
}

}  // namespace

std::string render_svg(std::span<const PlotSeries> series,
                       const SvgOptions& options) {
  if (series.empty()) {
    throw Error(ErrorCode::invalid_argument, "nothing to plot");
  }
  if (options.width < 200 || options.panel_height < 80) {
    throw Error(ErrorCode::invalid_argument, "plot area too small");
  }
  double t0 = std::numeric_limits<double>::infinity();
  double t1 = -t0;
  for (const auto& s : series) {
    if (s.series.size() < 2) {
      throw Error(ErrorCode::invalid_argument,
                  "series '" + s.name + "' needs at least 2 samples");
    }
    for (double v : s.series.values) require_finite(v, "plot value");
    t0 = std::min(t0, s.series.start);
    t1 = std::max(t1, s.series.end_time());
  }
  const double t_span = t1 > t0 ? t1 - t0 : 1.0;

  const int plot_w = options.width - kMarginLeft - kMarginRight;
  const int n_panels = static_cast<int>(series.size());
  const int height = kMarginTop + n_panels * (options.panel_height + kPanelGap) + 20;

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      "width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      options.width, height, options.width, height);
  if (!options.title.empty()) {
    svg += fmt::format(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
        "text-anchor=\"middle\">{}</text>\n",
        options.width / 2, escape(options.title));
  }

  for (int p = 0; p < n_panels; ++p) {
    const PlotSeries& s = series[static_cast<std::size_t>(p)];
    const auto& v = s.series.values;
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    double lo = *mn_it;
    double hi = *mx_it;
    if (hi - lo < 1e-12) {
      lo -= 0.5e-6;
      hi += 0.5e-6;
    }
    const int top = kMarginTop + p * (options.panel_height + kPanelGap);
    const int bottom = top + options.panel_height;
    const auto x_of = [&](double t) {
      return kMarginLeft + (t - t0) / t_span * plot_w;
    };
    const auto y_of = [&](double y) {
      return bottom - (y - lo) / (hi - lo) * options.panel_height;
    };

    svg += fmt::format(
        "<g>\n<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
        "stroke=\"#888\" stroke-width=\"1\"/>\n",
        kMarginLeft, top, plot_w, options.panel_height);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">"
        "{}</text>\n",
        kMarginLeft + 6, top + 14, escape(s.name));
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" "
        "text-anchor=\"end\">{:.6g}</text>\n"
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" "
        "text-anchor=\"end\">{:.6g}</text>\n",
        kMarginLeft - 4, top + 10, hi, kMarginLeft - 4, bottom, lo);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">"
        "{:.6g} s</text>\n"
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" "
        "text-anchor=\"end\">{:.6g} s</text>\n",
        kMarginLeft, bottom + 14, t0, kMarginLeft + plot_w, bottom + 14, t1);

    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"",
                       kColors[static_cast<std::size_t>(p) % std::size(kColors)]);
    bool first = true;
    for (std::size_t i : decimate(v, options.max_points)) {
      if (!first) svg += ' ';
      first = false;
      svg += fmt::format("{:.2f},{:.2f}", x_of(s.series.time_at(i)), y_of(v[i]));
    }
    svg += "\"/>\n</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace diffcal::io
