#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fairfront/format.hpp"

namespace fairfront {

// minimal single-series line chart; NaN values break the polyline
inline std::string render_line_chart(const std::string& title, const std::string& xlabel,
                                     const std::string& ylabel, const std::vector<double>& xs,
                                     const std::vector<double>& ys) {
    const double w = 640.0, h = 480.0, ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::isnan(xs[i]) || std::isnan(ys[i]))
            continue;
        if (first) {
            xmin = xmax = xs[i];
            ymin = ymax = ys[i];
            first = false;
        } else {
            xmin = std::min(xmin, xs[i]);
            xmax = std::max(xmax, xs[i]);
            ymin = std::min(ymin, ys[i]);
            ymax = std::max(ymax, ys[i]);
        }
    }
    if (xmax <= xmin)
        xmax = xmin + 1.0;
    if (ymax <= ymin)
        ymax = ymin + 1.0;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    svg << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">"
        << title << "</text>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (ml + w - mr) / 2.0 << "\" y=\"" << h - 12.0
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (mt + h - mb) / 2.0
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 "
        << (mt + h - mb) / 2.0 << ")\">" << ylabel << "</text>\n";
    // extreme tick labels
    svg << "<text x=\"" << ml << "\" y=\"" << h - mb + 16.0
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_double(xmin) << "</text>\n";
    svg << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 16.0
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_double(xmax) << "</text>\n";
    svg << "<text x=\"" << ml - 6.0 << "\" y=\"" << h - mb + 4.0
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_double(ymin) << "</text>\n";
    svg << "<text x=\"" << ml - 6.0 << "\" y=\"" << mt + 4.0
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_double(ymax) << "</text>\n";

    bool open = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::isnan(xs[i]) || std::isnan(ys[i])) {
            if (open)
                svg << "\"/>\n";
            open = false;
            continue;
        }
        if (!open) {
            svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
            open = true;
        } else {
            svg << ' ';
        }
        svg << format_double(px(xs[i])) << ',' << format_double(py(ys[i]));
    }
    if (open)
        svg << "\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace fairfront
