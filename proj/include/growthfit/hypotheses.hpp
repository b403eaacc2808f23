#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "growthfit/errors.hpp"
#include "growthfit/linear_fit.hpp"
#include "growthfit/piecewise.hpp"
#include "growthfit/time_series.hpp"

namespace growthfit {

enum class SegmentKind {
    stagnation,     ///< constant reciprocal (1 parameter)
    hyperbolic,     ///< declining reciprocal line, k constrained > 0 (2 parameters)
    unconstrained,  ///< free-slope reciprocal line (2 parameters)
};

inline const char* to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::stagnation: return "stagnation";
        case SegmentKind::hyperbolic: return "hyperbolic";
        default: return "unconstrained";
    }
}

inline std::optional<SegmentKind> segment_kind_from_string(const std::string& s) {
    if (s == "stagnation") return SegmentKind::stagnation;
    if (s == "hyperbolic") return SegmentKind::hyperbolic;
    if (s == "unconstrained") return SegmentKind::unconstrained;
    return std::nullopt;
}

/// A named layout of fixed regime boundaries and the per-span model kind.
struct RegimeHypothesis {
    std::string name;
    std::vector<double> boundaries;  ///< fixed years partitioning the data
    std::vector<SegmentKind> segment_kinds;
};

/// Galor's two-regime layout for less-developed countries: Malthusian
/// stagnation up to 1900, then a post-Malthusian span with a free trend.
inline RegimeHypothesis galor_ldc() {
    return {"galor-ldc", {1900.0}, {SegmentKind::stagnation, SegmentKind::unconstrained}};
}

/// Two hyperbolic epochs split at 1820, then a free-trend span after the
/// 1950 diversion.
inline RegimeHypothesis nielsen_africa() {
    return {"nielsen-africa",
            {1820.0, 1950.0},
            {SegmentKind::hyperbolic, SegmentKind::hyperbolic, SegmentKind::unconstrained}};
}

inline std::optional<RegimeHypothesis> built_in_hypothesis(const std::string& name) {
    if (name == "galor-ldc") return galor_ldc();
    if (name == "nielsen-africa") return nielsen_africa();
    return std::nullopt;
}

struct SpanFit {
    YearRange span;
    SegmentKind kind = SegmentKind::unconstrained;
    LinearFit fit;
    int n_params = 0;
    bool constant_fallback = false;  ///< hyperbolic span whose free slope came out k <= 0
};

struct HypothesisFit {
    RegimeHypothesis hypothesis;
    bool feasible = false;
    std::string error;  ///< set when infeasible
    std::vector<SpanFit> spans;
    double total_sse = 0.0;
    int n_total = 0;
    int n_params = 0;
    double aic = 0.0;
};

namespace detail {

/// Constant-reciprocal fit: the mean, with sse = total sum of squares.
inline LinearFit fit_constant(std::span<const ReciprocalPoint> points) {
    LinearFit fit;
    fit.n = static_cast<int>(points.size());
    fit.range = {points.front().year, points.back().year};
    double mean = 0.0;
    for (const ReciprocalPoint& p : points) mean += p.recip;
    mean /= fit.n;
    fit.a = mean;
    fit.k = 0.0;
    double sse = 0.0;
    for (const ReciprocalPoint& p : points) {
        const double d = p.recip - mean;
        sse += d * d;
    }
    fit.sse = sse;
    fit.r2 = sse == 0.0 ? 1.0 : 0.0;
    return fit;
}

inline SpanFit fit_span(std::span<const ReciprocalPoint> points, SegmentKind kind) {
    SpanFit sf;
    sf.kind = kind;
    sf.span = {points.front().year, points.back().year};
    switch (kind) {
        case SegmentKind::stagnation:
            sf.fit = fit_constant(points);
            sf.n_params = 1;
            break;
        case SegmentKind::hyperbolic: {
            sf.fit = fit_reciprocal_line(points);
            sf.n_params = 2;
            if (sf.fit.k <= 0.0) {
                sf.fit = fit_constant(points);
                sf.constant_fallback = true;
            }
            break;
        }
        case SegmentKind::unconstrained:
            sf.fit = fit_reciprocal_line(points);
            sf.n_params = 2;
            break;
    }
    return sf;
}

} // namespace detail

/// Fits one hypothesis. Boundaries outside the data's year span are clamped
/// to it. Throws (ValidationError / InfeasibleError) when the layout is
/// malformed or some span is too thin.
inline HypothesisFit fit_hypothesis(const TimeSeries& series, RegimeHypothesis hypothesis,
                                    int min_points = 3) {
    HypothesisFit result;
    if (hypothesis.segment_kinds.size() != hypothesis.boundaries.size() + 1) {
        throw ValidationError("hypothesis \"" + hypothesis.name + "\": " +
                              std::to_string(hypothesis.segment_kinds.size()) +
                              " segment kinds for " + std::to_string(hypothesis.boundaries.size()) +
                              " boundaries (need boundaries + 1)");
    }
    if (series.size() < 2) {
        throw InfeasibleError("hypothesis comparison needs at least 2 observations");
    }
    const YearRange span = series.year_span();
    for (std::size_t i = 0; i < hypothesis.boundaries.size(); ++i) {
        double& b = hypothesis.boundaries[i];
        b = std::clamp(b, static_cast<double>(span.start), static_cast<double>(span.end));
        if (i > 0 && b <= hypothesis.boundaries[i - 1]) {
            throw ValidationError("hypothesis \"" + hypothesis.name +
                                  "\": boundaries must be strictly increasing after clamping");
        }
    }
    result.hypothesis = hypothesis;

    const std::vector<ReciprocalPoint> points = reciprocal_transform(series);
    const auto spans = detail::split_at(points, hypothesis.boundaries);
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].size() < static_cast<std::size_t>(min_points)) {
            throw InfeasibleError("hypothesis \"" + hypothesis.name + "\": " +
                                  detail::span_description(i, spans.size(), hypothesis.boundaries) +
                                  " has " + std::to_string(spans[i].size()) +
                                  " observation(s), needs " + std::to_string(min_points));
        }
    }
    for (std::size_t i = 0; i < spans.size(); ++i) {
        SpanFit sf = detail::fit_span(spans[i], hypothesis.segment_kinds[i]);
        result.total_sse += sf.fit.sse;
        result.n_total += sf.fit.n;
        result.n_params += sf.n_params;
        result.spans.push_back(std::move(sf));
    }
    result.aic = aic_least_squares(result.n_total, result.total_sse, result.n_params);
    result.feasible = true;
    return result;
}

/// Fits every hypothesis and ranks the feasible ones by ascending AIC (ties:
/// fewer parameters, then name). Infeasible hypotheses are recorded at the
/// end of the list instead of aborting the comparison.
inline std::vector<HypothesisFit> compare_hypotheses(const TimeSeries& series,
                                                     const std::vector<RegimeHypothesis>& hypotheses,
                                                     int min_points = 3) {
    std::vector<HypothesisFit> fits;
    for (const RegimeHypothesis& h : hypotheses) {
        try {
            fits.push_back(fit_hypothesis(series, h, min_points));
        } catch (const Error& e) {
            HypothesisFit failed;
            failed.hypothesis = h;
            failed.feasible = false;
            failed.error = e.what();
            fits.push_back(std::move(failed));
        }
    }
    std::stable_sort(fits.begin(), fits.end(), [](const HypothesisFit& x, const HypothesisFit& y) {
        if (x.feasible != y.feasible) return x.feasible;
        if (!x.feasible) return x.hypothesis.name < y.hypothesis.name;
        if (x.aic != y.aic) return x.aic < y.aic;
        if (x.n_params != y.n_params) return x.n_params < y.n_params;
        return x.hypothesis.name < y.hypothesis.name;
    });
    return fits;
}

} // namespace growthfit
