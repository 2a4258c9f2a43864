#pragma once

#include <string>
#include <vector>

#include "tokencast/common.hpp"

namespace tokencast {

/**
 * A uniformly spaced univariate series. `start` is an integer period
 * index (the pipeline ignores calendar time entirely), `frequency` is a
 * tag such as "H", "D", "W", "M" used only to pick a default seasonality.
 */
struct TimeSeries {
    std::string id;
    std::string frequency;
    std::int64_t start = 0;
    std::vector<Obs> values;
};

/// A named collection of series with its evaluation protocol parameters:
/// the horizon H held out from each series and the seasonality S used by
/// the seasonal-naive reference.
struct Dataset {
    std::string name;
    std::vector<TimeSeries> series;
    int prediction_length = 1;
    int seasonality = 1;

    /// Throws DataError if any series is too short (length must exceed
    /// prediction_length so a nonempty context remains) or holds a
    /// non-finite observation.
    void validate() const;
};

/// One evaluation task: the observed context and the held-out tail.
struct SplitSeries {
    TimeSeries context;
    std::vector<Obs> target;
};

/// Splits every series into (first len-H values, last H values).
std::vector<SplitSeries> split_context_target(const Dataset& dataset);

} // namespace tokencast
