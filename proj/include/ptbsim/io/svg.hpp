#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ptbsim/io/csv.hpp"

namespace ptbsim::io {

enum class SeriesStyle { Simulated, Historical };

struct ChartSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    SeriesStyle style = SeriesStyle::Simulated;
};

struct ChartPanel {
    std::string title;
    std::string y_label;
    std::vector<ChartSeries> series;
};

struct Chart {
    std::string title;
    std::vector<ChartPanel> panels;
};

inline ChartSeries series_from_run(const engine::RunResult& run, std::string_view variable, std::string label) {
    return ChartSeries{std::move(label), run.times, run.trace(variable), SeriesStyle::Simulated};
}

inline ChartSeries series_from_data(const TimeSeries& data, std::string label) {
    ChartSeries s{std::move(label), {}, {}, SeriesStyle::Historical};
    for (const auto& pt : data.points) {
        s.x.push_back(pt.year);
        s.y.push_back(pt.value);
    }
    return s;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
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

inline std::string fixed(double v, int decimals = 1) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[64];
    const double a = std::abs(v);
    if (a >= 1e6) {
        std::snprintf(buf, sizeof buf, "%gM", v / 1e6);
    } else if (a >= 1e4) {
        std::snprintf(buf, sizeof buf, "%gk", v / 1e3);
    } else {
        std::snprintf(buf, sizeof buf, "%g", v);
    }
    return buf;
}

inline double nice_step(double span, int target) {
    const double raw = span / std::max(target, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
    return nice * mag;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            const double pad = std::max(std::abs(hi) * 0.05, 1e-6);
            lo -= pad;
            hi += pad;
        }
    }
};

inline constexpr std::string_view kPalette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                                                "#8c564b", "#17becf", "#7f7f7f"};
inline constexpr std::string_view kHistoricalColor = "#d62728";

}  // namespace detail

/// SVG 1.1 document, 960x540 viewBox. Panels are laid out side by side; each
/// series becomes one polyline. Historical series are drawn dashed in red.
inline std::string render_svg(const Chart& chart) {
    using namespace detail;
    constexpr double kWidth = 960.0, kHeight = 540.0;
    constexpr double kTop = 60.0, kBottom = 60.0, kLeft = 70.0, kRight = 20.0, kGap = 70.0;

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 960 540\" "
           "width=\"960\" height=\"540\" font-family=\"sans-serif\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"white\"/>\n";
    out += "<text x=\"480\" y=\"28\" font-size=\"18\" text-anchor=\"middle\">" + xml_escape(chart.title) +
           "</text>\n";

    const std::size_t n = std::max<std::size_t>(chart.panels.size(), 1);
    const double panel_w = (kWidth - kLeft - kRight - kGap * static_cast<double>(n - 1)) / static_cast<double>(n);
    const double panel_h = kHeight - kTop - kBottom;

    for (std::size_t pi = 0; pi < chart.panels.size(); ++pi) {
        const ChartPanel& panel = chart.panels[pi];
        const double x0 = kLeft + static_cast<double>(pi) * (panel_w + kGap);
        const double y0 = kTop;

        Range xr, yr;
        for (const auto& s : panel.series) {
            for (double v : s.x) xr.add(v);
            for (double v : s.y) yr.add(v);
        }
        xr.finish();
        yr.finish();
        const double ystep = nice_step(yr.hi - yr.lo, 5);
        yr.lo = std::floor(yr.lo / ystep) * ystep;
        yr.hi = std::ceil(yr.hi / ystep) * ystep;

        auto px = [&](double x) { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * panel_w; };
        auto py = [&](double y) { return y0 + panel_h - (y - yr.lo) / (yr.hi - yr.lo) * panel_h; };

        out += "<g class=\"panel\">\n";
        out += "<text x=\"" + fixed(x0 + panel_w / 2) + "\" y=\"" + fixed(y0 - 12) +
               "\" font-size=\"14\" text-anchor=\"middle\">" + xml_escape(panel.title) + "</text>\n";
        out += "<rect x=\"" + fixed(x0) + "\" y=\"" + fixed(y0) + "\" width=\"" + fixed(panel_w) + "\" height=\"" +
               fixed(panel_h) + "\" fill=\"none\" stroke=\"#333\"/>\n";

        for (double v = yr.lo; v <= yr.hi + ystep * 1e-6; v += ystep) {
            const std::string y = fixed(py(v));
            out += "<line x1=\"" + fixed(x0) + "\" y1=\"" + y + "\" x2=\"" + fixed(x0 + panel_w) + "\" y2=\"" + y +
                   "\" stroke=\"#ddd\"/>\n";
            out += "<text x=\"" + fixed(x0 - 6) + "\" y=\"" + fixed(py(v) + 4) +
                   "\" font-size=\"11\" text-anchor=\"end\">" + tick_label(v) + "</text>\n";
        }
        const double xstep = std::max(1.0, nice_step(xr.hi - xr.lo, 6));
        for (double v = std::ceil(xr.lo / xstep) * xstep; v <= xr.hi + 1e-9; v += xstep) {
            out += "<text x=\"" + fixed(px(v)) + "\" y=\"" + fixed(y0 + panel_h + 18) +
                   "\" font-size=\"11\" text-anchor=\"middle\">" + tick_label(v) + "</text>\n";
        }
        out += "<text x=\"" + fixed(x0 + panel_w / 2) + "\" y=\"" + fixed(y0 + panel_h + 40) +
               "\" font-size=\"12\" text-anchor=\"middle\">year</text>\n";
        out += "<text transform=\"translate(" + fixed(x0 - 52) + "," + fixed(y0 + panel_h / 2) +
               ") rotate(-90)\" font-size=\"12\" text-anchor=\"middle\">" + xml_escape(panel.y_label) + "</text>\n";

        std::size_t sim_index = 0;
        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const ChartSeries& s = panel.series[si];
            const bool hist = s.style == SeriesStyle::Historical;
            const std::string_view color = hist ? kHistoricalColor : kPalette[sim_index++ % std::size(kPalette)];
            std::string pts;
            for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
                if (!std::isfinite(s.y[k])) continue;
                if (!pts.empty()) pts += ' ';
                pts += fixed(px(s.x[k]), 2) + "," + fixed(py(s.y[k]), 2);
            }
            out += "<polyline class=\"" + std::string(hist ? "historical" : "simulated") + "\" fill=\"none\" stroke=\"" +
                   std::string(color) + "\" stroke-width=\"2\"";
            if (hist) out += " stroke-dasharray=\"6,4\"";
            out += " points=\"" + pts + "\"/>\n";

            const double ly = y0 + 16 + 16 * static_cast<double>(si);
            const double lx = x0 + 10;
            out += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 24) + "\" y2=\"" +
                   fixed(ly) + "\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\"" +
                   (hist ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
            out += "<text x=\"" + fixed(lx + 30) + "\" y=\"" + fixed(ly + 4) + "\" font-size=\"11\">" +
                   xml_escape(s.label) + "</text>\n";
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

inline void render_chart(const Chart& chart, const std::filesystem::path& path) {
    write_text(path, render_svg(chart));
}

}  // namespace ptbsim::io
