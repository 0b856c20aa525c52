#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gmreg {

// Minimal static SVG line plots: axes, tick labels at the range ends,
// one polyline per series.  Enough to eyeball a benchmark, nothing more.

struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
};

struct PlotOptions {
    std::string title;
    bool log_x = false;
    bool log_y = false;
    // series index and point index of an optional circled marker
    std::optional<std::pair<std::size_t, std::size_t>> marker;
};

void write_svg_plot(const std::string& path,
                    const std::vector<PlotSeries>& series,
                    const PlotOptions& opts);

}  // namespace gmreg
