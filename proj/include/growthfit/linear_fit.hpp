#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "growthfit/errors.hpp"
#include "growthfit/time_series.hpp"

namespace growthfit {

/// Reciprocal of one observation: the space in which hyperbolic growth is a
/// straight line.
struct ReciprocalPoint {
    int year = 0;
    double recip = 0.0;
};

/// Ordinary least squares line in reciprocal space with the sign convention
/// recip(t) = a - k*t, so k > 0 means the series is growing.
struct LinearFit {
    double a = 0.0;    ///< intercept at year 0
    double k = 0.0;    ///< decline rate of the reciprocal per year
    double r2 = 0.0;   ///< coefficient of determination (1 when tss == sse == 0)
    double sse = 0.0;  ///< sum of squared residuals, reciprocal units squared
    int n = 0;
    YearRange range;   ///< years actually covered by the fitted points
};

/// A LinearFit interpreted as the hyperbola S(t) = 1/(a - k*t). The
/// singularity year a/k exists only for k > 0.
struct HyperbolicFit {
    LinearFit line;
    std::optional<double> singularity_year;
};

struct YearResidual {
    int year = 0;
    double residual = 0.0;
};

inline std::vector<ReciprocalPoint> reciprocal_transform(const TimeSeries& series) {
    std::vector<ReciprocalPoint> points;
    points.reserve(series.size());
    for (const Observation& o : series.observations()) {
        points.push_back({o.year, 1.0 / o.value});
    }
    return points;
}

/// Unweighted OLS of recip on year. Uses centred sums; deterministic for
/// identical inputs. Throws InfeasibleError on fewer than 2 points or a
/// single distinct year.
inline LinearFit fit_reciprocal_line(std::span<const ReciprocalPoint> points) {
    const int n = static_cast<int>(points.size());
    if (n < 2) {
        throw InfeasibleError("cannot fit a line to " + std::to_string(n) + " point(s)");
    }
    double t_mean = 0.0, r_mean = 0.0;
    for (const ReciprocalPoint& p : points) {
        t_mean += p.year;
        r_mean += p.recip;
    }
    t_mean /= n;
    r_mean /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const ReciprocalPoint& p : points) {
        const double dt = p.year - t_mean;
        sxx += dt * dt;
        sxy += dt * (p.recip - r_mean);
    }
    if (sxx == 0.0) {
        throw InfeasibleError("cannot fit a line: all points share year " +
                              std::to_string(points[0].year));
    }
    const double slope = sxy / sxx;
    LinearFit fit;
    fit.k = -slope;
    fit.a = r_mean - slope * t_mean;
    fit.n = n;
    fit.range = {points.front().year, points.back().year};
    double sse = 0.0, tss = 0.0;
    for (const ReciprocalPoint& p : points) {
        const double e = p.recip - (fit.a - fit.k * p.year);
        sse += e * e;
        const double d = p.recip - r_mean;
        tss += d * d;
    }
    fit.sse = sse;
    fit.r2 = tss == 0.0 ? 1.0 : 1.0 - sse / tss;
    return fit;
}

/// Year where the fitted reciprocal reaches zero: a/k for k > 0, otherwise
/// no finite blow-up.
inline std::optional<double> singularity_year(const LinearFit& fit) {
    if (fit.k > 0.0) return fit.a / fit.k;
    return std::nullopt;
}

inline HyperbolicFit to_hyperbolic(const LinearFit& fit) {
    return {fit, singularity_year(fit)};
}

/// Fits the reciprocal line on a whole series.
inline HyperbolicFit fit_series(const TimeSeries& series) {
    const std::vector<ReciprocalPoint> points = reciprocal_transform(series);
    return to_hyperbolic(fit_reciprocal_line(points));
}

/// Fits the reciprocal line on the observations inside `range`.
inline HyperbolicFit fit_window(const TimeSeries& series, YearRange range) {
    return fit_series(window(series, range));
}

/// Predicted value 1/(a - k*year). Throws SingularityError when the fitted
/// denominator is not positive.
inline double hyperbolic_predict(const HyperbolicFit& fit, double year) {
    const double denom = fit.line.a - fit.line.k * year;
    if (denom <= 0.0) {
        std::string at = fit.singularity_year ? std::to_string(*fit.singularity_year)
                                              : std::string("none");
        throw SingularityError("prediction at year " + std::to_string(year) +
                               " is at or beyond the singularity year " + at);
    }
    return 1.0 / denom;
}

/// Residuals recip_observed - (a - k*year). A positive residual means the
/// observation lies above the fitted line: growth slower than the fitted
/// hyperbola.
inline std::vector<YearResidual> residuals_reciprocal(const LinearFit& fit,
                                                      std::span<const ReciprocalPoint> points) {
    std::vector<YearResidual> out;
    out.reserve(points.size());
    for (const ReciprocalPoint& p : points) {
        out.push_back({p.year, p.recip - (fit.a - fit.k * p.year)});
    }
    return out;
}

} // namespace growthfit
