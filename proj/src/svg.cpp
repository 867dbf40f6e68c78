#include "bp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bp/errors.hpp"

namespace bp {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMargin = 48;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
                          "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#98df8a", "#c5b0d5"};
constexpr int kPaletteSize = int(sizeof(kPalette) / sizeof(kPalette[0]));
constexpr const char* kNoiseColor = "#000000";
constexpr const char* kHighlightColor = "#e41a1c";

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Mapper {
    PlotBounds b;
    double sx(double x) const {
        double span = b.x_max - b.x_min;
        if (span <= 0.0) return kWidth / 2.0;
        return kMargin + (x - b.x_min) / span * (kWidth - 2 * kMargin);
    }
    double sy(double y) const {
        double span = b.y_max - b.y_min;
        if (span <= 0.0) return kHeight / 2.0;
        return kHeight - kMargin - (y - b.y_min) / span * (kHeight - 2 * kMargin);
    }
};

void open_document(std::string& out, const std::string& title) {
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!title.empty())
        out += "<text x=\"" + std::to_string(kWidth / 2) +
               "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
               escape_xml(title) + "</text>\n";
}

}  // namespace

PlotBounds plot_bounds(const PointSet& points) {
    PlotBounds b{points.coord(0, 0), points.coord(0, 0), 0.0, 0.0};
    const bool has_y = points.dim() >= 2;
    if (has_y) b.y_min = b.y_max = points.coord(0, 1);
    for (int i = 0; i < points.size(); ++i) {
        b.x_min = std::min(b.x_min, points.coord(i, 0));
        b.x_max = std::max(b.x_max, points.coord(i, 0));
        if (has_y) {
            b.y_min = std::min(b.y_min, points.coord(i, 1));
            b.y_max = std::max(b.y_max, points.coord(i, 1));
        }
    }
    double x_pad = (b.x_max - b.x_min) * 0.05 + 1e-9;
    double y_pad = (b.y_max - b.y_min) * 0.05 + 1e-9;
    b.x_min -= x_pad;
    b.x_max += x_pad;
    b.y_min -= y_pad;
    b.y_max += y_pad;
    return b;
}

std::string scatter_svg(const PointSet& points, const std::vector<int>& labels,
                        const std::vector<char>& highlight, const std::string& title,
                        std::optional<PlotBounds> fixed_bounds) {
    if (int(labels.size()) != points.size())
        throw ValidationError("label count does not match the point count");
    if (!highlight.empty() && int(highlight.size()) != points.size())
        throw ValidationError("highlight mask does not match the point count");

    Mapper m{fixed_bounds ? *fixed_bounds : plot_bounds(points)};
    std::string out;
    open_document(out, title);

    const bool has_y = points.dim() >= 2;
    for (int i = 0; i < points.size(); ++i) {
        double x = m.sx(points.coord(i, 0));
        double y = m.sy(has_y ? points.coord(i, 1) : 0.0);
        bool hot = !highlight.empty() && highlight[i];
        const char* color = hot                ? kHighlightColor
                            : labels[i] < 0    ? kNoiseColor
                                               : kPalette[labels[i] % kPaletteSize];
        out += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"" +
               (hot ? "3.5" : "2.5") + "\" fill=\"" + color + "\" fill-opacity=\"0.8\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string line_svg(const std::vector<LineSeries>& series, const std::string& x_label,
                     const std::string& y_label, const std::string& title) {
    if (series.empty()) throw ValidationError("line chart needs at least one series");

    PlotBounds b;
    bool first = true;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            if (first) {
                b = {x, x, y, y};
                first = false;
            }
            b.x_min = std::min(b.x_min, x);
            b.x_max = std::max(b.x_max, x);
            b.y_min = std::min(b.y_min, y);
            b.y_max = std::max(b.y_max, y);
        }
    }
    if (first) throw ValidationError("line chart needs at least one data point");
    double x_pad = (b.x_max - b.x_min) * 0.05 + 1e-9;
    double y_pad = (b.y_max - b.y_min) * 0.05 + 1e-9;
    PlotBounds data = b;
    b = {b.x_min - x_pad, b.x_max + x_pad, b.y_min - y_pad, b.y_max + y_pad};
    Mapper m{b};

    std::string out;
    open_document(out, title);

    // Frame and ticks.
    out += "<rect x=\"" + std::to_string(kMargin) + "\" y=\"" + std::to_string(kMargin) +
           "\" width=\"" + std::to_string(kWidth - 2 * kMargin) + "\" height=\"" +
           std::to_string(kHeight - 2 * kMargin) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    const int kTicks = 5;
    for (int i = 0; i < kTicks; ++i) {
        double fx = data.x_min + (data.x_max - data.x_min) * i / double(kTicks - 1);
        double fy = data.y_min + (data.y_max - data.y_min) * i / double(kTicks - 1);
        out += "<text x=\"" + fmt(m.sx(fx)) + "\" y=\"" + std::to_string(kHeight - kMargin + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
               fmt(fx) + "</text>\n";
        out += "<text x=\"" + std::to_string(kMargin - 6) + "\" y=\"" + fmt(m.sy(fy) + 3) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + fmt(fy) +
               "</text>\n";
    }
    out += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"" +
           std::to_string(kHeight - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape_xml(x_label) + "</text>\n";
    out += "<text x=\"14\" y=\"" + std::to_string(kHeight / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 " +
           std::to_string(kHeight / 2) + ")\">" + escape_xml(y_label) + "</text>\n";

    for (const auto& s : series) {
        std::string pts;
        for (auto [x, y] : s.points) pts += fmt(m.sx(x)) + "," + fmt(m.sy(y)) + " ";
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" +
               (s.dashed ? " stroke-dasharray=\"6 3\"" : "") + " points=\"" + pts + "\"/>\n";
        for (auto [x, y] : s.points)
            out += "<circle cx=\"" + fmt(m.sx(x)) + "\" cy=\"" + fmt(m.sy(y)) +
                   "\" r=\"2.5\" fill=\"" + s.color + "\"/>\n";
    }

    // Legend, top-right inside the frame.
    int ly = kMargin + 14;
    for (const auto& s : series) {
        out += "<line x1=\"" + std::to_string(kWidth - kMargin - 130) + "\" y1=\"" +
               std::to_string(ly - 4) + "\" x2=\"" + std::to_string(kWidth - kMargin - 106) +
               "\" y2=\"" + std::to_string(ly - 4) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"2\"" + (s.dashed ? " stroke-dasharray=\"6 3\"" : "") + "/>\n";
        out += "<text x=\"" + std::to_string(kWidth - kMargin - 100) + "\" y=\"" +
               std::to_string(ly) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
               escape_xml(s.label) + "</text>\n";
        ly += 16;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace bp
