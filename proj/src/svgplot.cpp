#include "gmreg/svgplot.hpp"

#include "gmreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace gmreg {
namespace {

constexpr double kWidth = 860, kHeight = 560;
constexpr double kLeft = 72, kRight = 24, kTop = 44, kBottom = 52;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                         "#9467bd", "#ff7f0e", "#8c564b"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

}  // namespace

void write_svg_plot(const std::string& path,
                    const std::vector<PlotSeries>& series,
                    const PlotOptions& opts) {
    auto tx = [&](double v) {
        return opts.log_x ? std::log10(std::max(v, 1e-300)) : v;
    };
    auto ty = [&](double v) {
        return opts.log_y ? std::log10(std::max(v, 1e-300)) : v;
    };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double x = tx(s.x[i]), y = ty(s.y[i]);
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opts.title.empty())
        out << "<text x=\"" << kWidth / 2 << "\" y=\"26\" font-size=\"17\" "
               "font-family=\"sans-serif\" text-anchor=\"middle\">"
            << esc(opts.title) << "</text>\n";

    // frame + ticks
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
        << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 4.0;
        const double fy = ymin + (ymax - ymin) * k / 4.0;
        const double gx = px(fx), gy = py(fy);
        out << "<line x1=\"" << gx << "\" y1=\"" << kTop + ph << "\" x2=\""
            << gx << "\" y2=\"" << kTop + ph + 5
            << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << gx << "\" y=\"" << kTop + ph + 20
            << "\" font-size=\"12\" font-family=\"sans-serif\" "
               "text-anchor=\"middle\">"
            << fmt(opts.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << gy << "\" x2=\""
            << kLeft << "\" y2=\"" << gy
            << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << gy + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\" "
               "text-anchor=\"end\">"
            << fmt(opts.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kColors[si % (sizeof(kColors) / sizeof(*kColors))];
        std::ostringstream pts;
        bool open = false;
        auto flush = [&]() {
            if (open)
                out << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\" points=\"" << pts.str()
                    << "\"/>\n";
            pts.str("");
            open = false;
        };
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double x = tx(s.x[i]), y = ty(s.y[i]);
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            pts << px(x) << ',' << py(y) << ' ';
            open = true;
        }
        flush();
        if (!s.label.empty())
            out << "<text x=\"" << kWidth - kRight - 8 << "\" y=\""
                << kTop + 18 + 16 * static_cast<double>(si)
                << "\" font-size=\"13\" font-family=\"sans-serif\" "
                   "text-anchor=\"end\" fill=\""
                << color << "\">" << esc(s.label) << "</text>\n";
    }

    if (opts.marker) {
        const auto [si, pi] = *opts.marker;
        if (si < series.size() && pi < series[si].x.size() &&
            pi < series[si].y.size()) {
            const double x = tx(series[si].x[pi]), y = ty(series[si].y[pi]);
            if (std::isfinite(x) && std::isfinite(y))
                out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
                    << "\" r=\"6\" fill=\"none\" stroke=\"black\" "
                       "stroke-width=\"1.5\"/>\n";
        }
    }

    out << "</svg>\n";
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace gmreg
