#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sgg/core/errors.hpp"

namespace sgg::cli {

// Minimal static SVG line plots for the saved JSON artifacts. Vector output,
// no display dependencies.
struct Series {
    std::string label;
    std::string color = "#2060c0";
    std::vector<double> x;
    std::vector<double> y;
};

inline void write_line_plot(const std::filesystem::path& path, const std::string& title,
                            const std::string& x_label, const std::string& y_label,
                            const std::vector<Series>& series, double marker_x = -1.0) {
    constexpr int W = 640, H = 420, ML = 64, MR = 24, MT = 40, MB = 48;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) throw DataError("plot: no data points");
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    ymin = std::min(ymin, 0.0);
    const auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    const auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ofstream out(path);
    if (!out) throw DataError("cannot write plot: " + path.string());
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";
    // axes
    out << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    out << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    out << "<text x='" << (ML + W - MR) / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
    out << "<text x='16' y='" << (MT + H - MB) / 2
        << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
        << (MT + H - MB) / 2 << ")'>" << y_label << "</text>\n";
    // tick labels
    char buf[64];
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        std::snprintf(buf, sizeof(buf), "%.4g", xv);
        out << "<text x='" << px(xv) << "' y='" << H - MB + 16
            << "' text-anchor='middle' font-size='10'>" << buf << "</text>\n";
        std::snprintf(buf, sizeof(buf), "%.4g", yv);
        out << "<text x='" << ML - 6 << "' y='" << py(yv) + 4
            << "' text-anchor='end' font-size='10'>" << buf << "</text>\n";
    }
    // optional vertical marker (e.g. x_opt)
    if (marker_x >= xmin && marker_x <= xmax) {
        out << "<line x1='" << px(marker_x) << "' y1='" << MT << "' x2='" << px(marker_x)
            << "' y2='" << H - MB << "' stroke='#c03020' stroke-dasharray='5,4'/>\n";
        std::snprintf(buf, sizeof(buf), "x_opt=%.4g", marker_x);
        out << "<text x='" << px(marker_x) + 4 << "' y='" << MT + 14
            << "' font-size='11' fill='#c03020'>" << buf << "</text>\n";
    }
    const std::vector<std::string> palette = {"#2060c0", "#c07020", "#208050", "#8040a0",
                                              "#c03060"};
    for (std::size_t s = 0; s < series.size(); ++s) {
        const std::string color =
            series[s].color.empty() ? palette[s % palette.size()] : series[s].color;
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            out << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
        out << "'/>\n";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            out << "<circle cx='" << px(series[s].x[i]) << "' cy='" << py(series[s].y[i])
                << "' r='2.5' fill='" << color << "'/>\n";
        out << "<text x='" << W - MR - 8 << "' y='" << MT + 16 + 14 * s
            << "' text-anchor='end' font-size='11' fill='" << color << "'>" << series[s].label
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace sgg::cli
