#pragma once
// Dependency-free SVG line charts: per-series mean lines with optional shaded
// confidence bands, axes with ticks, and a legend. Output is a pure function
// of the inputs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "releap/errors.hpp"

namespace releap {

struct ChartSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> lo;  // leave empty for no band
    std::vector<double> hi;
};

inline std::string xml_escape(const std::string& s) {
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

class LineChart {
  public:
    LineChart(int width = 760, int height = 480) : width_(width), height_(height) {}

    void set_title(std::string t) { title_ = std::move(t); }
    void set_x_label(std::string t) { x_label_ = std::move(t); }
    void set_y_label(std::string t) { y_label_ = std::move(t); }

    void add_series(ChartSeries s) {
        if (s.x.size() != s.y.size()) throw ShapeError("LineChart: x and y sizes disagree");
        if (!s.lo.empty() && (s.lo.size() != s.x.size() || s.hi.size() != s.x.size()))
            throw ShapeError("LineChart: band sizes disagree");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            expand(x_min_, x_max_, s.x[i]);
            expand(y_min_, y_max_, s.y[i]);
            if (!s.lo.empty()) {
                expand(y_min_, y_max_, s.lo[i]);
                expand(y_min_, y_max_, s.hi[i]);
            }
        }
        series_.push_back(std::move(s));
    }

    // affine data-to-pixel maps over the padded ranges; valid once at least
    // one point has been added
    double map_x(double v) const {
        const auto [lo, hi] = padded(x_min_, x_max_);
        return margin_left_ + (v - lo) / (hi - lo) * plot_width();
    }

    double map_y(double v) const {
        const auto [lo, hi] = padded(y_min_, y_max_);
        return static_cast<double>(height_) - margin_bottom_ -
               (v - lo) / (hi - lo) * plot_height();
    }

    std::string render() const {
        if (series_.empty()) throw PreconditionError("LineChart: no series");
        std::string svg;
        svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) +
               "\" height=\"" + std::to_string(height_) + "\" viewBox=\"0 0 " +
               std::to_string(width_) + " " + std::to_string(height_) + "\">\n";
        svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

        for (std::size_t i = 0; i < series_.size(); ++i) {
            const ChartSeries& s = series_[i];
            const std::string& color = palette(i);
            if (!s.lo.empty() && s.x.size() > 1) {
                std::string pts;
                for (std::size_t k = 0; k < s.x.size(); ++k)
                    pts += num(map_x(s.x[k])) + "," + num(map_y(s.hi[k])) + " ";
                for (std::size_t k = s.x.size(); k-- > 0;)
                    pts += num(map_x(s.x[k])) + "," + num(map_y(s.lo[k])) + " ";
                svg += "<polygon points=\"" + pts + "\" fill=\"" + color +
                       "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
            }
            std::string pts;
            for (std::size_t k = 0; k < s.x.size(); ++k)
                pts += num(map_x(s.x[k])) + "," + num(map_y(s.y[k])) + " ";
            svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"2\"/>\n";
        }

        svg += axes();
        svg += legend();
        if (!title_.empty())
            svg += "<text x=\"" + num(width_ / 2.0) +
                   "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
                   "font-family=\"sans-serif\">" +
                   xml_escape(title_) + "</text>\n";
        svg += "</svg>\n";
        return svg;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw IoError("cannot open for writing: " + path);
        out << render();
        out.flush();
        if (!out) throw IoError("write failed: " + path);
    }

    static const std::string& palette(std::size_t i) {
        static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                     "#ff7f0e", "#8c564b", "#17becf"};
        return colors[i % colors.size()];
    }

  private:
    static void expand(double& lo, double& hi, double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    static std::pair<double, double> padded(double lo, double hi) {
        if (!(lo <= hi)) throw PreconditionError("LineChart: no data range yet");
        double span = hi - lo;
        if (span <= 0.0) span = lo != 0.0 ? std::abs(lo) : 1.0;
        return {lo - 0.05 * span, hi + 0.05 * span};
    }

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    double plot_width() const { return static_cast<double>(width_) - margin_left_ - margin_right_; }
    double plot_height() const {
        return static_cast<double>(height_) - margin_top_ - margin_bottom_;
    }

    std::string axes() const {
        std::string svg;
        const double x0 = margin_left_, x1 = static_cast<double>(width_) - margin_right_;
        const double y0 = static_cast<double>(height_) - margin_bottom_, y1 = margin_top_;
        svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) +
               "\" y2=\"" + num(y0) + "\" stroke=\"black\"/>\n";
        svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) +
               "\" y2=\"" + num(y1) + "\" stroke=\"black\"/>\n";

        const auto [xlo, xhi] = padded(x_min_, x_max_);
        const auto [ylo, yhi] = padded(y_min_, y_max_);
        for (int k = 0; k <= 4; ++k) {
            const double fx = xlo + (xhi - xlo) * k / 4.0;
            const double px = map_x(fx);
            svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(px) +
                   "\" y2=\"" + num(y0 + 5) + "\" stroke=\"black\"/>\n";
            svg += "<text x=\"" + num(px) + "\" y=\"" + num(y0 + 20) +
                   "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" +
                   num(fx) + "</text>\n";
            const double fy = ylo + (yhi - ylo) * k / 4.0;
            const double py = map_y(fy);
            svg += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(x0) +
                   "\" y2=\"" + num(py) + "\" stroke=\"black\"/>\n";
            svg += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(py + 4) +
                   "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" +
                   num(fy) + "</text>\n";
        }
        if (!x_label_.empty())
            svg += "<text x=\"" + num((x0 + x1) / 2.0) + "\" y=\"" +
                   num(static_cast<double>(height_) - 8) +
                   "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" +
                   xml_escape(x_label_) + "</text>\n";
        if (!y_label_.empty())
            svg += "<text x=\"14\" y=\"" + num((y0 + y1) / 2.0) +
                   "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
                   "transform=\"rotate(-90 14 " +
                   num((y0 + y1) / 2.0) + ")\">" + xml_escape(y_label_) + "</text>\n";
        return svg;
    }

    std::string legend() const {
        std::string svg;
        const double lx = static_cast<double>(width_) - margin_right_ - 150.0;
        double ly = margin_top_ + 10.0;
        for (std::size_t i = 0; i < series_.size(); ++i) {
            svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) +
                   "\" y2=\"" + num(ly) + "\" stroke=\"" + palette(i) +
                   "\" stroke-width=\"2\"/>\n";
            svg += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) +
                   "\" font-size=\"12\" font-family=\"sans-serif\">" +
                   xml_escape(series_[i].label) + "</text>\n";
            ly += 18.0;
        }
        return svg;
    }

    int width_, height_;
    double margin_left_ = 64.0, margin_right_ = 24.0, margin_top_ = 40.0, margin_bottom_ = 48.0;
    std::string title_, x_label_, y_label_;
    std::vector<ChartSeries> series_;
    double x_min_ = std::numeric_limits<double>::infinity();
    double x_max_ = -std::numeric_limits<double>::infinity();
    double y_min_ = std::numeric_limits<double>::infinity();
    double y_max_ = -std::numeric_limits<double>::infinity();
};

}  // namespace releap
