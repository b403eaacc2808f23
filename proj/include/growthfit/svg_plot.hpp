#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "growthfit/errors.hpp"
#include "growthfit/format.hpp"
#include "growthfit/linear_fit.hpp"
#include "growthfit/time_series.hpp"

namespace growthfit {

enum class PlotSpace { reciprocal, direct };

struct Annotation {
    double year = 0.0;
    std::string label;
};

/// A figure description. Rendering is a pure function of this struct: no
/// clock, locale or environment enters the output.
struct PlotSpec {
    PlotSpace space = PlotSpace::reciprocal;
    TimeSeries series;
    std::vector<HyperbolicFit> overlays;  ///< lines in reciprocal space, curves in direct space
    YearRange year_range;
    std::vector<Annotation> annotations;
    std::string title;
    bool log_value = false;  ///< log-scaled value axis (direct space only)
};

namespace svg_detail {

constexpr double kWidth = 840.0, kHeight = 520.0;
constexpr double kLeft = 72.0, kRight = 812.0, kTop = 42.0, kBottom = 464.0;
constexpr double kFitSampleStep = 2.0;  // years

inline double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double m = raw / mag;
    double f = 10.0;
    if (m <= 1.0) f = 1.0;
    else if (m <= 2.0) f = 2.0;
    else if (m <= 5.0) f = 5.0;
    return f * mag;
}

inline std::vector<double> ticks(double lo, double hi, int target = 6) {
    const double step = nice_step(hi - lo, target);
    std::vector<double> out;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + step * 1e-9; t += step) out.push_back(t == 0.0 ? 0.0 : t);
    return out;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Mapper {
    double x_lo, x_hi, y_lo, y_hi;
    bool log_y;

    double px(double year) const {
        return kLeft + (year - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
    }
    double py(double v) const {
        const double lo = log_y ? std::log10(y_lo) : y_lo;
        const double hi = log_y ? std::log10(y_hi) : y_hi;
        const double vv = log_y ? std::log10(v) : v;
        return kBottom - (vv - lo) / (hi - lo) * (kBottom - kTop);
    }
};

} // namespace svg_detail

/// Renders a self-contained SVG 1.1 document. Data points are circle
/// markers, fits are polylines sampled at 2-year steps (direct-space curves
/// stop one sample before the singularity), coordinates carry 6 significant
/// digits. Byte-identical output for identical specs.
inline std::string render_plot(const PlotSpec& spec) {
    using namespace svg_detail;

    validated(spec.year_range);
    if (spec.year_range.start == spec.year_range.end) {
        throw ValidationError("cannot plot a zero-width year range at " +
                              std::to_string(spec.year_range.start));
    }
    const TimeSeries visible = window(spec.series, spec.year_range);
    if (visible.empty()) {
        throw InfeasibleError("nothing to plot: no observations in [" +
                              std::to_string(spec.year_range.start) + ", " +
                              std::to_string(spec.year_range.end) + "]");
    }
    for (const HyperbolicFit& fit : spec.overlays) {
        if (fit.line.range.end < spec.year_range.start || fit.line.range.start > spec.year_range.end) {
            throw ValidationError("overlay fitted on [" + std::to_string(fit.line.range.start) +
                                  ", " + std::to_string(fit.line.range.end) +
                                  "] does not intersect the plotted year range");
        }
    }

    const bool reciprocal = spec.space == PlotSpace::reciprocal;
    const bool log_y = spec.log_value && !reciprocal;

    double v_max = 0.0, v_min_pos = std::numeric_limits<double>::max();
    for (const Observation& o : visible.observations()) {
        const double v = reciprocal ? 1.0 / o.value : o.value;
        v_max = std::max(v_max, v);
        v_min_pos = std::min(v_min_pos, v);
    }
    const double y_lo = log_y ? v_min_pos / 1.5 : 0.0;
    const double y_hi = log_y ? v_max * 1.5 : v_max * 1.05;

    Mapper map{static_cast<double>(spec.year_range.start), static_cast<double>(spec.year_range.end),
               y_lo, y_hi, log_y};

    auto num = [](double x) { return fmt_sig(x, 6); };

    std::string s;
    s.reserve(1 << 16);
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    s += "<desc>space=" + std::string(reciprocal ? "reciprocal" : "direct") + " window=" +
         std::to_string(spec.year_range.start) + ":" + std::to_string(spec.year_range.end) +
         " log_value=" + (spec.log_value ? "true" : "false") +
         " overlays=" + std::to_string(spec.overlays.size()) + "</desc>\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";
    s += "<defs><clipPath id=\"plotclip\"><rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) +
         "\" width=\"" + num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
         "\"/></clipPath></defs>\n";

    if (!spec.title.empty()) {
        s += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"26\" text-anchor=\"middle\" "
             "font-family=\"sans-serif\" font-size=\"16\">" + xml_escape(spec.title) + "</text>\n";
    }

    // axes
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(kRight) +
         "\" y2=\"" + num(kBottom) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kBottom) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (double t : ticks(map.x_lo, map.x_hi)) {
        const double x = map.px(t);
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(kBottom + 5) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + num(x) + "\" y=\"" + num(kBottom + 20) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + num(t) +
             "</text>\n";
    }
    std::vector<double> y_ticks;
    if (log_y) {
        for (int e = static_cast<int>(std::floor(std::log10(y_lo))); std::pow(10.0, e) <= y_hi; ++e) {
            const double v = std::pow(10.0, e);
            if (v >= y_lo) y_ticks.push_back(v);
        }
    } else {
        y_ticks = ticks(y_lo, y_hi);
    }
    for (double v : y_ticks) {
        const double y = map.py(v);
        s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) +
             "\" y2=\"" + num(y) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" + num(v) +
             "</text>\n";
    }

    const std::string unit = visible.unit().empty() ? "value" : visible.unit();
    const std::string y_label = reciprocal ? "1 / (" + unit + ")" : unit;
    s += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kHeight - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">Year</text>\n";
    s += "<text x=\"18\" y=\"" + num((kTop + kBottom) / 2) + "\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " +
         num((kTop + kBottom) / 2) + ")\">" + xml_escape(y_label) + "</text>\n";

    s += "<g id=\"plot-area\" data-x-min=\"" + num(map.x_lo) + "\" data-x-max=\"" + num(map.x_hi) +
         "\" data-y-min=\"" + num(y_lo) + "\" data-y-max=\"" + num(y_hi) + "\" data-y-scale=\"" +
         (log_y ? "log10" : "linear") + "\" data-px-left=\"" + num(kLeft) + "\" data-px-right=\"" +
         num(kRight) + "\" data-px-top=\"" + num(kTop) + "\" data-px-bottom=\"" + num(kBottom) +
         "\">\n";

    static const char* kOverlayColors[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b", "#ff7f0e"};
    s += "<g clip-path=\"url(#plotclip)\">\n";
    for (std::size_t i = 0; i < spec.overlays.size(); ++i) {
        const LinearFit& line = spec.overlays[i].line;
        const auto& sing = spec.overlays[i].singularity_year;
        std::string pts;
        double t = map.x_lo;
        bool open = true;
        while (open) {
            if (t >= map.x_hi) {
                t = map.x_hi;
                open = false;
            }
            if (!reciprocal && sing && t > *sing - kFitSampleStep) break;
            const double denom = line.a - line.k * t;
            const double v = reciprocal ? denom : (denom > 0.0 ? 1.0 / denom : -1.0);
            if (!reciprocal && v <= 0.0) break;
            if (!(log_y && v <= 0.0)) {
                pts += num(map.px(t)) + "," + num(map.py(v)) + " ";
            }
            t += kFitSampleStep;
        }
        if (!pts.empty()) pts.pop_back();
        s += "<polyline class=\"fit\" fill=\"none\" stroke=\"";
        s += kOverlayColors[i % (sizeof kOverlayColors / sizeof *kOverlayColors)];
        s += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    for (const Annotation& ann : spec.annotations) {
        if (ann.year < map.x_lo || ann.year > map.x_hi) continue;
        const double x = map.px(ann.year);
        s += "<line class=\"annot\" x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) +
             "\" y2=\"" + num(kBottom) + "\" stroke=\"#888888\" stroke-width=\"1\" "
             "stroke-dasharray=\"4 3\"/>\n";
        s += "<text x=\"" + num(x + 4) + "\" y=\"" + num(kTop + 14) +
             "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">" +
             xml_escape(ann.label) + "</text>\n";
    }
    s += "</g>\n";

    for (const Observation& o : visible.observations()) {
        const double v = reciprocal ? 1.0 / o.value : o.value;
        s += "<circle class=\"pt\" cx=\"" + num(map.px(o.year)) + "\" cy=\"" + num(map.py(v)) +
             "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

} // namespace growthfit
