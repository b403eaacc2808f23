#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "growthfit/divergence.hpp"
#include "growthfit/format.hpp"
#include "growthfit/hypotheses.hpp"
#include "growthfit/linear_fit.hpp"
#include "growthfit/piecewise.hpp"
#include "growthfit/stagnation.hpp"
#include "growthfit/time_series.hpp"

namespace growthfit {

using json = nlohmann::ordered_json;

/// Analysis thresholds, echoed into every emitted document so results are
/// self-describing.
struct AnalysisConfig {
    int min_points = 3;
    double t_critical = 2.0;
    int run_length = 3;
    double exceedance_factor = 2.0;
    double break_support_threshold = 1e-3;
};

enum class ReportFormat { structured, human };

/// JSON has no representation for non-finite doubles (an exact fit has
/// AIC -inf); those become strings.
inline json json_number(double x) {
    if (std::isfinite(x)) return x;
    return fmt_sig(x);
}

inline json to_json(const YearRange& r) { return json{{"start", r.start}, {"end", r.end}}; }

inline json to_json(const AnalysisConfig& c) {
    return json{{"min_points", c.min_points},
                {"t_critical", c.t_critical},
                {"run_length", c.run_length},
                {"exceedance_factor", c.exceedance_factor},
                {"break_support_threshold", c.break_support_threshold}};
}

/// Flat fit record: a, k, r2, sse, n, range, singularity_year.
inline json fit_record(const LinearFit& fit) {
    json j{{"a", fit.a}, {"k", fit.k}, {"r2", json_number(fit.r2)}, {"sse", fit.sse},
           {"n", fit.n}, {"range", to_json(fit.range)}};
    if (auto sy = singularity_year(fit)) {
        j["singularity_year"] = *sy;
    } else {
        j["singularity_year"] = "none";
    }
    return j;
}

inline json to_json(const HyperbolicFit& fit) { return fit_record(fit.line); }

inline json to_json(const PiecewiseModel& model) {
    json segments = json::array();
    for (const HyperbolicFit& seg : model.segments) segments.push_back(fit_record(seg.line));
    return json{{"breakpoints", model.breakpoints}, {"segments", segments},
                {"total_sse", model.total_sse},     {"n_total", model.n_total},
                {"n_params", model.n_params},       {"aic", json_number(model.aic)}};
}

inline json to_json(const BreakpointSearch& search) {
    json j = to_json(search.model);
    j["rel_sse_improvement"] = search.rel_sse_improvement;
    j["support_threshold"] = search.support_threshold;
    j["supported"] = search.supported;
    return j;
}

inline json to_json(const StagnationVerdict& v) {
    return json{{"fit", fit_record(v.fit)},
                {"slope", v.slope},
                {"slope_stderr", v.slope_stderr},
                {"t_stat", json_number(v.t_stat)},
                {"threshold", v.threshold},
                {"verdict", to_string(v.verdict)}};
}

inline json to_json(const DivergenceReport& d) {
    json trace = json::array();
    for (const ResidualFlag& r : d.residual_trace) {
        trace.push_back(json{{"year", r.year}, {"residual", r.residual}, {"exceeds", r.exceeds}});
    }
    json j{{"baseline", fit_record(d.baseline.line)},
           {"baseline_rmse", d.baseline_rmse},
           {"run_length", d.run_length},
           {"exceedance_factor", d.exceedance_factor}};
    if (d.onset_year) {
        j["onset_year"] = *d.onset_year;
    } else {
        j["onset_year"] = "none";
    }
    j["residual_trace"] = trace;
    return j;
}

inline json to_json(const HypothesisFit& h) {
    json j{{"name", h.hypothesis.name}, {"feasible", h.feasible}};
    if (!h.feasible) {
        j["error"] = h.error;
        return j;
    }
    json spans = json::array();
    for (const SpanFit& s : h.spans) {
        json sj{{"span", to_json(s.span)},
                {"kind", to_string(s.kind)},
                {"fit", fit_record(s.fit)},
                {"n_params", s.n_params}};
        if (s.constant_fallback) sj["constant_fallback"] = true;
        spans.push_back(sj);
    }
    j["boundaries"] = h.hypothesis.boundaries;
    j["spans"] = spans;
    j["total_sse"] = h.total_sse;
    j["n_total"] = h.n_total;
    j["n_params"] = h.n_params;
    j["aic"] = json_number(h.aic);
    return j;
}

/// Everything one `report` run produces, reproducible from the input file
/// plus the echoed configuration.
struct AnalysisReport {
    std::string input_file;
    std::string series_name;
    std::string unit;
    int n_observations = 0;
    YearRange years;

    AnalysisConfig config;
    YearRange breaks_window;
    int n_breaks = 1;
    YearRange stagnation_window;
    YearRange baseline_range;
    int search_from = 0;
    std::vector<std::string> hypothesis_names;

    HyperbolicFit full_fit;
    BreakpointSearch breaks;
    StagnationVerdict stagnation;
    DivergenceReport divergence;
    std::vector<HypothesisFit> hypotheses;
};

inline json report_to_json(const AnalysisReport& r) {
    json config = to_json(r.config);
    config["breaks_window"] = to_json(r.breaks_window);
    config["n_breaks"] = r.n_breaks;
    config["stagnation_window"] = to_json(r.stagnation_window);
    config["baseline_range"] = to_json(r.baseline_range);
    config["search_from"] = r.search_from;
    config["hypotheses"] = r.hypothesis_names;

    json fits{{"full", fit_record(r.full_fit.line)}};
    json segments = json::array();
    for (const HyperbolicFit& seg : r.breaks.model.segments) segments.push_back(fit_record(seg.line));
    fits["segments"] = segments;

    json hyps = json::array();
    for (const HypothesisFit& h : r.hypotheses) hyps.push_back(to_json(h));

    return json{{"provenance", json{{"file", r.input_file},
                                    {"name", r.series_name},
                                    {"unit", r.unit},
                                    {"n_observations", r.n_observations},
                                    {"years", to_json(r.years)}}},
                {"config", config},
                {"fits", fits},
                {"breakpoints", to_json(r.breaks)},
                {"stagnation", to_json(r.stagnation)},
                {"divergence", to_json(r.divergence)},
                {"hypotheses", hyps}};
}

namespace detail {

inline std::string human_range(const YearRange& r) {
    return "[" + std::to_string(r.start) + ", " + std::to_string(r.end) + "]";
}

inline std::string human_fit(const LinearFit& f) {
    std::string s = "a=" + fmt_sig(f.a) + " k=" + fmt_sig(f.k) + " r2=" + fmt_sig(f.r2) +
                    " sse=" + fmt_sig(f.sse) + " n=" + std::to_string(f.n);
    if (auto sy = singularity_year(f)) s += " singularity~" + fmt_sig(*sy);
    return s;
}

} // namespace detail

/// Renders the report either as the machine-readable JSON document (stable
/// key order) or as a human-readable verdict summary.
inline std::string write_report(const AnalysisReport& r, ReportFormat format) {
    if (format == ReportFormat::structured) {
        return report_to_json(r).dump(2) + "\n";
    }
    using detail::human_fit;
    using detail::human_range;
    std::string s;
    s += "Analysis of \"" + r.series_name + "\" (" + r.input_file + ")\n";
    s += "  " + std::to_string(r.n_observations) + " observations, years " +
         std::to_string(r.years.start) + "-" + std::to_string(r.years.end);
    if (!r.unit.empty()) s += ", unit: " + r.unit;
    s += "\n";
    s += "  config: min_points=" + std::to_string(r.config.min_points) +
         " t_critical=" + fmt_sig(r.config.t_critical) +
         " run_length=" + std::to_string(r.config.run_length) +
         " exceedance_factor=" + fmt_sig(r.config.exceedance_factor) +
         " break_support_threshold=" + fmt_sig(r.config.break_support_threshold) + "\n\n";

    s += "Whole-range hyperbolic fit " + human_range(r.full_fit.line.range) + ": " +
         human_fit(r.full_fit.line) + "\n\n";

    s += "Breakpoint search on " + human_range(r.breaks_window) + " (" +
         std::to_string(r.n_breaks) + " break):\n";
    s += "  breakpoints:";
    for (double b : r.breaks.model.breakpoints) s += " " + fmt_sig(b);
    s += "  (relative SSE improvement " + fmt_sig(r.breaks.rel_sse_improvement) +
         (r.breaks.supported ? " >= " : " < ") + fmt_sig(r.breaks.support_threshold) +
         (r.breaks.supported ? ": supported" : ": not supported") + ")\n";
    for (const HyperbolicFit& seg : r.breaks.model.segments) {
        s += "    segment " + human_range(seg.line.range) + ": " + human_fit(seg.line) + "\n";
    }
    if (r.breaks.model.segments.size() == 2) {
        const double k0 = r.breaks.model.segments[0].line.k;
        const double k1 = r.breaks.model.segments[1].line.k;
        if (k0 > 0 && k1 > k0) {
            s += "  the later segment grows faster (k " + fmt_sig(k0) + " -> " + fmt_sig(k1) +
                 "): a growth-to-growth transition\n";
        }
    }
    s += "\n";

    s += "Stagnation test on " + human_range(r.stagnation_window) + ": t=" + fmt_sig(r.stagnation.t_stat) +
         (r.stagnation.verdict == StagnationCall::growth ? " > " : " <= ") + fmt_sig(r.stagnation.threshold);
    if (r.stagnation.verdict == StagnationCall::growth) {
        s += " -> growth; no stagnation detected on " + human_range(r.stagnation_window) + "\n\n";
    } else {
        s += " -> stagnation-compatible: a flat reciprocal trend cannot be rejected\n\n";
    }

    s += "Divergence from the hyperbola fitted on " + human_range(r.baseline_range) +
         ", searched from " + std::to_string(r.search_from) + ": ";
    if (r.divergence.onset_year) {
        s += "onset " + std::to_string(*r.divergence.onset_year) + " (first run of " +
             std::to_string(r.divergence.run_length) + " residuals above " +
             fmt_sig(r.divergence.exceedance_factor) + " x RMSE " +
             fmt_sig(r.divergence.baseline_rmse) + "): growth diverted to a slower trajectory\n\n";
    } else {
        s += "no sustained divergence found\n\n";
    }

    s += "Hypothesis ranking (ascending AIC):\n";
    int rank = 1;
    for (const HypothesisFit& h : r.hypotheses) {
        if (!h.feasible) {
            s += "  -  " + h.hypothesis.name + ": infeasible (" + h.error + ")\n";
            continue;
        }
        s += "  " + std::to_string(rank++) + ". " + h.hypothesis.name +
             "  aic=" + fmt_sig(h.aic) + " sse=" + fmt_sig(h.total_sse) +
             " params=" + std::to_string(h.n_params);
        for (const SpanFit& sp : h.spans) {
            if (sp.constant_fallback) {
                s += " [span " + detail::human_range(sp.span) + " fell back to constant]";
            }
        }
        s += "\n";
    }
    return s;
}

} // namespace growthfit
