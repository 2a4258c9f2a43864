#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tokencast/forecaster.hpp"
#include "tokencast/series.hpp"

namespace tokencast {

/// Frequency tag -> season length used by the seasonal-naive reference.
using SeasonalityTable = std::map<std::string, int>;

/// H:24, D:7, W:1, M:12, Q:4, Y:1, 30min:48, 15min:96.
const SeasonalityTable& default_seasonality_table();

/// Season length for a frequency tag; unknown tags fall back to 1.
int season_length(const std::string& frequency,
                  const SeasonalityTable& table = default_seasonality_table());

struct PointForecast {
    std::vector<double> values;
    bool fell_back_to_naive = false; // context was shorter than the season
};

/**
 * forecast[h] = context[len - S + ((h - 1) mod S)]. Missing source
 * entries fall back to the most recent observed value at the same
 * phase, then to the last observed value anywhere. A context shorter
 * than S degrades to S = 1 and flags the result.
 */
PointForecast seasonal_naive(std::span<const Obs> context, int horizon, int season);

/// Last observed value repeated `horizon` times.
std::vector<double> naive(std::span<const Obs> context, int horizon);

/// Wraps a point forecast as a degenerate predictive distribution, so
/// point baselines flow through the same evaluation path as sampled
/// forecasts.
QuantileForecast as_quantile_forecast(std::span<const double> point,
                                      std::span<const double> levels,
                                      std::string id);

} // namespace tokencast
