#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "growthfit/errors.hpp"
#include "growthfit/linear_fit.hpp"
#include "growthfit/time_series.hpp"

namespace growthfit {

enum class StagnationCall {
    stagnation_compatible,  ///< a flat reciprocal trend cannot be rejected
    growth,                 ///< the declining reciprocal trend is significant
};

/// One-sided t-test of the reciprocal-space slope against the constant
/// (Malthusian-equilibrium) null.
struct StagnationVerdict {
    LinearFit fit;            ///< line fitted on the tested window
    double slope = 0.0;       ///< fitted k
    double slope_stderr = 0.0;
    double t_stat = 0.0;      ///< k / stderr; +inf for an exact declining line
    double threshold = 2.0;
    StagnationCall verdict = StagnationCall::stagnation_compatible;
};

inline const char* to_string(StagnationCall call) {
    return call == StagnationCall::growth ? "growth" : "stagnation-compatible";
}

/// Fits the window's reciprocal line and tests k > 0 at the given critical
/// value. Needs at least 3 observations (the slope standard error is
/// undefined for n = 2).
inline StagnationVerdict test_stagnation(const TimeSeries& series, YearRange range,
                                         double critical = 2.0) {
    const TimeSeries windowed = window(series, range);
    if (windowed.size() < 3) {
        throw InfeasibleError("stagnation test needs at least 3 observations, window [" +
                              std::to_string(range.start) + ", " + std::to_string(range.end) +
                              "] has " + std::to_string(windowed.size()));
    }
    const std::vector<ReciprocalPoint> points = reciprocal_transform(windowed);
    StagnationVerdict v;
    v.fit = fit_reciprocal_line(points);
    v.slope = v.fit.k;
    v.threshold = critical;

    double t_mean = 0.0;
    for (const ReciprocalPoint& p : points) t_mean += p.year;
    t_mean /= static_cast<double>(points.size());
    double sxx = 0.0;
    for (const ReciprocalPoint& p : points) {
        const double dt = p.year - t_mean;
        sxx += dt * dt;
    }
    v.slope_stderr = std::sqrt(v.fit.sse / (v.fit.n - 2) / sxx);

    if (v.slope_stderr == 0.0) {
        // exact line: reject the flat null unless the slope itself is flat
        v.t_stat = v.slope > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        v.t_stat = v.slope / v.slope_stderr;
    }
    v.verdict = v.t_stat > v.threshold ? StagnationCall::growth
                                       : StagnationCall::stagnation_compatible;
    return v;
}

} // namespace growthfit
