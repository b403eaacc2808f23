#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "growthfit/errors.hpp"

namespace growthfit {

/// One (year, value) data point. Values must be strictly positive so the
/// reciprocal representation is always defined.
struct Observation {
    int year = 0;
    double value = 0.0;
};

/// Inclusive span of calendar years.
struct YearRange {
    int start = 0;
    int end = 0;

    bool contains(int year) const { return start <= year && year <= end; }
};

inline YearRange validated(YearRange r) {
    if (r.start > r.end) {
        throw ValidationError("invalid year range: start " + std::to_string(r.start) +
                              " exceeds end " + std::to_string(r.end));
    }
    return r;
}

/// An ordered series of strictly positive observations with strictly
/// increasing years. Immutable after construction.
class TimeSeries {
public:
    TimeSeries() = default;

    TimeSeries(std::string name, std::string unit, std::vector<Observation> observations)
        : name_(std::move(name)), unit_(std::move(unit)), obs_(std::move(observations)) {
        std::sort(obs_.begin(), obs_.end(),
                  [](const Observation& a, const Observation& b) { return a.year < b.year; });
        for (std::size_t i = 0; i < obs_.size(); ++i) {
            if (obs_[i].value <= 0.0) {
                throw ValidationError("non-positive value at year " + std::to_string(obs_[i].year));
            }
            if (i > 0 && obs_[i].year == obs_[i - 1].year) {
                throw ValidationError("duplicate year " + std::to_string(obs_[i].year));
            }
        }
    }

    const std::string& name() const { return name_; }
    const std::string& unit() const { return unit_; }
    const std::vector<Observation>& observations() const { return obs_; }

    std::size_t size() const { return obs_.size(); }
    bool empty() const { return obs_.empty(); }

    /// Span from first to last observed year. Requires a non-empty series.
    YearRange year_span() const {
        if (obs_.empty()) throw ValidationError("year_span of empty series");
        return {obs_.front().year, obs_.back().year};
    }

private:
    std::string name_;
    std::string unit_;
    std::vector<Observation> obs_;
};

/// Observations with range.start <= year <= range.end, order preserved.
/// May return a series too short for fitting; fitting operations do their
/// own size checks.
inline TimeSeries window(const TimeSeries& series, YearRange range) {
    validated(range);
    std::vector<Observation> kept;
    for (const Observation& o : series.observations()) {
        if (range.contains(o.year)) kept.push_back(o);
    }
    return TimeSeries(series.name(), series.unit(), std::move(kept));
}

} // namespace growthfit
