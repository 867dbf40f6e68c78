#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bp/pointset.hpp"

namespace bp {

struct PlotBounds {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
};

// Axis-aligned bounds of the first two coordinates (y collapses to 0 for
// one-dimensional data), padded by 5% on each side.
PlotBounds plot_bounds(const PointSet& points);

// Scatter of the first two coordinates as a complete SVG document: one
// circle per point, colored by label (noise black, palette cycling
// otherwise), highlighted points drawn red and slightly larger. Fixed
// bounds keep axes stable across related frames.
std::string scatter_svg(const PointSet& points, const std::vector<int>& labels,
                        const std::vector<char>& highlight = {}, const std::string& title = "",
                        std::optional<PlotBounds> fixed_bounds = std::nullopt);

struct LineSeries {
    std::string label;
    std::string color;  // any SVG color
    bool dashed = false;
    std::vector<std::pair<double, double>> points;
};

// Line chart with axes, tick labels, and a legend.
std::string line_svg(const std::vector<LineSeries>& series, const std::string& x_label,
                     const std::string& y_label, const std::string& title = "");

}  // namespace bp
