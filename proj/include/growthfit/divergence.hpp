#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "growthfit/errors.hpp"
#include "growthfit/linear_fit.hpp"
#include "growthfit/time_series.hpp"

namespace growthfit {

struct ResidualFlag {
    int year = 0;
    double residual = 0.0;
    bool exceeds = false;
};

/// Where the data bend away (upward, in reciprocal space) from a baseline
/// hyperbola: the onset is the first year starting `run_length` consecutive
/// residuals above exceedance_factor times the baseline RMSE.
struct DivergenceReport {
    HyperbolicFit baseline;
    std::optional<int> onset_year;
    int run_length = 3;
    double exceedance_factor = 2.0;
    double baseline_rmse = 0.0;
    std::vector<ResidualFlag> residual_trace;
};

/// Fits the baseline on baseline_range, then scans residuals of all
/// observations from search_from onward. A baseline RMSE of exactly zero
/// (exact synthetic data) makes any strictly positive residual count as an
/// exceedance.
inline DivergenceReport detect_divergence(const TimeSeries& series, YearRange baseline_range,
                                          int search_from, int run_length = 3,
                                          double exceedance_factor = 2.0) {
    validated(baseline_range);
    if (search_from < baseline_range.start) {
        throw ValidationError("search_from " + std::to_string(search_from) +
                              " precedes the baseline range start " +
                              std::to_string(baseline_range.start));
    }
    if (run_length < 1) {
        throw ValidationError("run_length must be at least 1");
    }

    DivergenceReport report;
    report.run_length = run_length;
    report.exceedance_factor = exceedance_factor;
    report.baseline = fit_window(series, baseline_range);
    report.baseline_rmse = std::sqrt(report.baseline.line.sse / report.baseline.line.n);

    std::vector<ReciprocalPoint> tail;
    for (const Observation& o : series.observations()) {
        if (o.year >= search_from) tail.push_back({o.year, 1.0 / o.value});
    }
    const std::vector<YearResidual> residuals = residuals_reciprocal(report.baseline.line, tail);

    const double cutoff = exceedance_factor * report.baseline_rmse;
    for (const YearResidual& r : residuals) {
        const bool exceeds = report.baseline_rmse == 0.0 ? r.residual > 0.0 : r.residual > cutoff;
        report.residual_trace.push_back({r.year, r.residual, exceeds});
    }

    int run = 0;
    for (std::size_t i = 0; i < report.residual_trace.size(); ++i) {
        run = report.residual_trace[i].exceeds ? run + 1 : 0;
        if (run == run_length) {
            report.onset_year = report.residual_trace[i + 1 - run_length].year;
            break;
        }
    }
    return report;
}

} // namespace growthfit
