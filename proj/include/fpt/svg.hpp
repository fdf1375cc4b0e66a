// svg.hpp — Minimal self-contained SVG plots (axes, polylines, scatter)

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fpt {

// Accumulates series and renders one standalone <svg> document with a framed
// plot area, linear tick labels, and the accumulated geometry. CSV stays the
// authoritative output; these files exist for quick visual inspection.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void polyline(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color);
    void scatter(const std::vector<double>& x, const std::vector<double>& y,
                 const std::string& color, double radius = 2.0);
    // Horizontal/vertical reference line across the plot area.
    void hline(double y, const std::string& color);
    void vline(double x, const std::string& color);

    std::string render() const;
    void save(const std::filesystem::path& path) const;

private:
    struct Series {
        bool filled;  // scatter (true) vs polyline (false)
        std::vector<double> x, y;
        std::string color;
        double radius;
    };
    struct RefLine {
        char kind;  // 'h' or 'v'
        double at;
        std::string color;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    std::vector<RefLine> refs_;
};

} // namespace fpt
