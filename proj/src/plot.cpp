#include "cryodaq/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cryodaq::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr int kTicks = 5;

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

std::string num(double v, int digits = 6) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

struct Range {
    double lo;
    double hi;
};

Range pad(double lo, double hi) {
    if (!(lo <= hi)) return {0.0, 1.0};
    if (lo == hi) {
        const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
        return {lo - d, hi + d};
    }
    return {lo, hi};
}

}  // namespace

std::string render_svg(std::span<const Sample> records, const PlotLabels& labels) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const auto& r : records) {
        if (!std::isfinite(r.time_index) || !std::isfinite(r.calibrated)) continue;
        xmin = std::min(xmin, r.time_index);
        xmax = std::max(xmax, r.time_index);
        ymin = std::min(ymin, r.calibrated);
        ymax = std::max(ymax, r.calibrated);
    }
    const Range xr = pad(xmin, xmax);
    const Range yr = pad(ymin, ymax);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto sy = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << escape(labels.title) << "</text>\n"
        << "<g stroke=\"black\" stroke-width=\"1\">\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << kTop + plot_h << "\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
        << "\"/>\n";
    for (int i = 0; i < kTicks; ++i) {
        const double f = static_cast<double>(i) / (kTicks - 1);
        const double x = kLeft + f * plot_w;
        const double y = kTop + plot_h - f * plot_h;
        svg << "<line x1=\"" << x << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << x << "\" y2=\""
            << kTop + plot_h + 5 << "\"/>\n"
            << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y << "\"/>\n";
    }
    svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i < kTicks; ++i) {
        const double f = static_cast<double>(i) / (kTicks - 1);
        svg << "<text x=\"" << kLeft + f * plot_w << "\" y=\"" << kTop + plot_h + 18
            << "\" text-anchor=\"middle\">" << num(xr.lo + f * (xr.hi - xr.lo)) << "</text>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << kTop + plot_h - f * plot_h + 4
            << "\" text-anchor=\"end\">" << num(yr.lo + f * (yr.hi - yr.lo)) << "</text>\n";
    }
    svg << "</g>\n"
        << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(labels.x_label)
        << "</text>\n"
        << "<text x=\"20\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 20 " << kTop + plot_h / 2 << ")\">" << escape(labels.y_label)
        << "</text>\n"
        << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& r : records) {
        if (!std::isfinite(r.time_index) || !std::isfinite(r.calibrated)) continue;
        if (!first) svg << ' ';
        first = false;
        svg << num(sx(r.time_index), 8) << ',' << num(sy(r.calibrated), 8);
    }
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

}  // namespace cryodaq::plot
