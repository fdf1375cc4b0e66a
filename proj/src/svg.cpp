#include "fpt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fpt/io.hpp"

namespace fpt {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 72, kRight = 24, kTop = 40, kBottom = 52;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Round an axis range outward to pleasant tick spacing; returns {lo, step}.
std::pair<double, double> ticks(double lo, double hi) {
    double span = hi - lo;
    if (span <= 0) span = std::max(std::abs(lo), 1.0);
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) { step = mag * m; break; }
    }
    return {std::floor(lo / step) * step, step};
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::polyline(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color) {
    if (x.size() != y.size())
        throw std::invalid_argument("SvgPlot::polyline: x and y lengths differ");
    series_.push_back({false, x, y, color, 0.0});
}

void SvgPlot::scatter(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& color, double radius) {
    if (x.size() != y.size())
        throw std::invalid_argument("SvgPlot::scatter: x and y lengths differ");
    series_.push_back({true, x, y, color, radius});
}

void SvgPlot::hline(double y, const std::string& color) {
    refs_.push_back({'h', y, color});
}

void SvgPlot::vline(double x, const std::string& color) {
    refs_.push_back({'v', x, color});
}

std::string SvgPlot::render() const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Series& s : series_) {
        for (double v : s.x) {
            if (std::isfinite(v)) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
        }
        for (double v : s.y) {
            if (std::isfinite(v)) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
        }
    }
    for (const RefLine& r : refs_) {
        if (r.kind == 'h') { ymin = std::min(ymin, r.at); ymax = std::max(ymax, r.at); }
        else { xmin = std::min(xmin, r.at); xmax = std::max(xmax, r.at); }
    }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; }
    if (!std::isfinite(ymin)) { ymin = 0; ymax = 1; }
    if (xmax == xmin) { xmax = xmin + 1; xmin -= 1; }
    if (ymax == ymin) { ymax = ymin + 0.5; ymin -= 0.5; }
    const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto X = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double v) { return kTop + ph - (v - ymin) / (ymax - ymin) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape_xml(title_) << "</text>\n";

    // frame + ticks
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
        << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
    auto [x0, dx] = ticks(xmin, xmax);
    for (double v = x0; v <= xmax + 1e-12 * dx; v += dx) {
        if (v < xmin) continue;
        svg << "<line x1=\"" << X(v) << "\" y1=\"" << kTop + ph << "\" x2=\"" << X(v)
            << "\" y2=\"" << kTop + ph + 5 << "\" stroke=\"#444\"/>\n";
        svg << "<text x=\"" << X(v) << "\" y=\"" << kTop + ph + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(v) << "</text>\n";
    }
    auto [y0, dy] = ticks(ymin, ymax);
    for (double v = y0; v <= ymax + 1e-12 * dy; v += dy) {
        if (v < ymin) continue;
        svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << Y(v) << "\" x2=\"" << kLeft
            << "\" y2=\"" << Y(v) << "\" stroke=\"#444\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << Y(v) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(v) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape_xml(x_label_) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << kTop + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << kTop + ph / 2 << ")\">" << escape_xml(y_label_)
        << "</text>\n";

    // reference lines first so data draws over them
    for (const RefLine& r : refs_) {
        if (r.kind == 'h')
            svg << "<line x1=\"" << kLeft << "\" y1=\"" << Y(r.at) << "\" x2=\"" << kLeft + pw
                << "\" y2=\"" << Y(r.at) << "\" stroke=\"" << r.color
                << "\" stroke-dasharray=\"5 4\"/>\n";
        else
            svg << "<line x1=\"" << X(r.at) << "\" y1=\"" << kTop << "\" x2=\"" << X(r.at)
                << "\" y2=\"" << kTop + ph << "\" stroke=\"" << r.color
                << "\" stroke-dasharray=\"5 4\"/>\n";
    }
    for (const Series& s : series_) {
        if (s.x.empty()) continue;
        if (s.filled) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                svg << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i]) << "\" r=\""
                    << s.radius << "\" fill=\"" << s.color << "\"/>\n";
            }
        } else {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                svg << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
            }
            svg << "\"/>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void SvgPlot::save(const std::filesystem::path& path) const {
    write_text(path, render());
}

} // namespace fpt
