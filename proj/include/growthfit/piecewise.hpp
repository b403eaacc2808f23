#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "growthfit/errors.hpp"
#include "growthfit/linear_fit.hpp"
#include "growthfit/time_series.hpp"

namespace growthfit {

/// Least-squares AIC: n*ln(sse/n) + 2p. Returns -inf for an exact fit.
inline double aic_least_squares(int n, double sse, int n_params) {
    return n * std::log(sse / n) + 2.0 * n_params;
}

/// Piecewise hyperbolic model: one independent reciprocal-space line per
/// span between consecutive breakpoints. An observation exactly at a
/// breakpoint belongs to the earlier segment.
struct PiecewiseModel {
    std::vector<double> breakpoints;
    std::vector<HyperbolicFit> segments;
    double total_sse = 0.0;
    int n_total = 0;
    int n_params = 0;  ///< 2 per segment + one per freely searched breakpoint
    double aic = 0.0;
};

namespace detail {

inline std::vector<std::span<const ReciprocalPoint>>
split_at(std::span<const ReciprocalPoint> points, std::span<const double> breakpoints) {
    std::vector<std::span<const ReciprocalPoint>> spans;
    std::size_t begin = 0;
    for (double b : breakpoints) {
        std::size_t end = begin;
        while (end < points.size() && points[end].year <= b) ++end;
        spans.push_back(points.subspan(begin, end - begin));
        begin = end;
    }
    spans.push_back(points.subspan(begin));
    return spans;
}

inline std::string span_description(std::size_t index, std::size_t count,
                                    std::span<const double> breakpoints) {
    auto fmt = [](double b) {
        const double r = std::round(b);
        if (r == b) return std::to_string(static_cast<long long>(r));
        return std::to_string(b);
    };
    if (count == 1) return "whole range";
    if (index == 0) return "span up to " + fmt(breakpoints[0]);
    if (index + 1 == count) return "span after " + fmt(breakpoints[index - 1]);
    return "span (" + fmt(breakpoints[index - 1]) + ", " + fmt(breakpoints[index]) + "]";
}

} // namespace detail

/// Fits one reciprocal line per span. Breakpoints must be strictly
/// increasing and strictly inside the data's year span; they need not
/// coincide with observation years. Throws InfeasibleError when any span
/// holds fewer than min_points observations.
inline PiecewiseModel fit_piecewise(const TimeSeries& series, std::vector<double> breakpoints,
                                    int min_points = 3, int free_breakpoints = 0) {
    if (series.size() < 2) {
        throw InfeasibleError("piecewise fit needs at least 2 observations");
    }
    const YearRange span = series.year_span();
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (i > 0 && breakpoints[i] <= breakpoints[i - 1]) {
            throw ValidationError("breakpoints must be strictly increasing");
        }
        if (breakpoints[i] <= span.start || breakpoints[i] >= span.end) {
            throw InfeasibleError("breakpoint " + std::to_string(breakpoints[i]) +
                                  " is not strictly inside the data years [" +
                                  std::to_string(span.start) + ", " + std::to_string(span.end) + "]");
        }
    }

    const std::vector<ReciprocalPoint> points = reciprocal_transform(series);
    const auto spans = detail::split_at(points, breakpoints);

    PiecewiseModel model;
    model.breakpoints = std::move(breakpoints);
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].size() < static_cast<std::size_t>(min_points)) {
            throw InfeasibleError("infeasible partition: " +
                                  detail::span_description(i, spans.size(), model.breakpoints) +
                                  " has " + std::to_string(spans[i].size()) + " observation(s), needs " +
                                  std::to_string(min_points));
        }
    }
    for (std::size_t i = 0; i < spans.size(); ++i) {
        HyperbolicFit fit = to_hyperbolic(fit_reciprocal_line(spans[i]));
        model.total_sse += fit.line.sse;
        model.n_total += fit.line.n;
        model.segments.push_back(std::move(fit));
    }
    model.n_params = 2 * static_cast<int>(model.segments.size()) + free_breakpoints;
    model.aic = aic_least_squares(model.n_total, model.total_sse, model.n_params);
    return model;
}

/// Exhaustive breakpoint search result. `rel_sse_improvement` is the SSE
/// gained over the best model with one fewer break, as a fraction of the
/// window's total sum of squares about the mean reciprocal (a fraction of
/// SSE itself is undefined for exact fits). The break is flagged
/// unsupported when the improvement falls below the threshold.
struct BreakpointSearch {
    PiecewiseModel model;
    double rel_sse_improvement = 0.0;
    bool supported = false;
    double support_threshold = 0.0;
};

namespace detail {

inline double total_sum_of_squares(std::span<const ReciprocalPoint> points) {
    double mean = 0.0;
    for (const ReciprocalPoint& p : points) mean += p.recip;
    mean /= static_cast<double>(points.size());
    double tss = 0.0;
    for (const ReciprocalPoint& p : points) {
        const double d = p.recip - mean;
        tss += d * d;
    }
    return tss;
}

/// Best model over all placements of n_breaks breakpoints at observation
/// years, ties resolved toward the earliest year(s). Candidate order is
/// lexicographic, so the first strict improvement wins.
inline PiecewiseModel search_exhaustive(const TimeSeries& series, int n_breaks, int min_points) {
    const std::vector<Observation>& obs = series.observations();
    const int n = static_cast<int>(obs.size());
    PiecewiseModel best_model;
    bool found = false;

    auto consider = [&](std::vector<double> breaks) {
        PiecewiseModel m = fit_piecewise(series, std::move(breaks), min_points, n_breaks);
        if (!found || m.total_sse < best_model.total_sse) {
            best_model = std::move(m);
            found = true;
        }
    };

    if (n_breaks == 1) {
        for (int i = min_points - 1; i + min_points < n; ++i) {
            consider({static_cast<double>(obs[i].year)});
        }
    } else {
        for (int i = min_points - 1; i < n; ++i) {
            for (int j = i + min_points; j + min_points < n; ++j) {
                consider({static_cast<double>(obs[i].year), static_cast<double>(obs[j].year)});
            }
        }
    }
    if (!found) {
        throw InfeasibleError("no feasible partition of " + std::to_string(n) +
                              " observations into " + std::to_string(n_breaks + 1) +
                              " spans of at least " + std::to_string(min_points));
    }
    return best_model;
}

} // namespace detail

/// Minimizes total SSE over breakpoints placed at observation years.
/// Supports n_breaks of 1 or 2; each searched breakpoint counts as one free
/// parameter in the AIC.
inline BreakpointSearch search_breakpoints(const TimeSeries& series, int n_breaks,
                                           int min_points = 3, double support_threshold = 1e-3) {
    if (n_breaks < 1 || n_breaks > 2) {
        throw ValidationError("n_breaks must be 1 or 2, got " + std::to_string(n_breaks));
    }
    BreakpointSearch result;
    result.model = detail::search_exhaustive(series, n_breaks, min_points);
    const double sse_fewer =
        n_breaks == 1 ? fit_piecewise(series, {}, min_points).total_sse
                      : detail::search_exhaustive(series, n_breaks - 1, min_points).total_sse;
    const double tss = detail::total_sum_of_squares(reciprocal_transform(series));
    result.rel_sse_improvement = tss == 0.0 ? 0.0 : (sse_fewer - result.model.total_sse) / tss;
    result.support_threshold = support_threshold;
    result.supported = result.rel_sse_improvement >= support_threshold;
    return result;
}

} // namespace growthfit
