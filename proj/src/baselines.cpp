#include "tokencast/baselines.hpp"

#include <algorithm>

namespace tokencast {

const SeasonalityTable& default_seasonality_table() {
    static const SeasonalityTable table = {
        {"H", 24}, {"D", 7},  {"W", 1},      {"M", 12},
        {"Q", 4},  {"Y", 1},  {"30min", 48}, {"15min", 96},
    };
    return table;
}

int season_length(const std::string& frequency, const SeasonalityTable& table) {
    const auto it = table.find(frequency);
    return it != table.end() ? it->second : 1;
}

namespace {

// Last observed value at or before `from`, same phase (stride S).
Obs latest_at_phase(std::span<const Obs> context, std::size_t from, std::size_t stride) {
    for (std::size_t i = from;; i -= stride) {
        if (context[i]) return context[i];
        if (i < stride) break;
    }
    return std::nullopt;
}

Obs last_observed(std::span<const Obs> context) {
    for (std::size_t i = context.size(); i > 0; --i) {
        if (context[i - 1]) return context[i - 1];
    }
    return std::nullopt;
}

} // namespace

PointForecast seasonal_naive(std::span<const Obs> context, int horizon, int season) {
    if (horizon < 1) throw ConfigError("seasonal_naive: horizon must be >= 1");
    if (season < 1) throw ConfigError("seasonal_naive: season must be >= 1");
    if (context.empty()) throw DataError("seasonal_naive: empty context");

    PointForecast out;
    std::size_t stride = static_cast<std::size_t>(season);
    if (context.size() < stride) {
        stride = 1;
        out.fell_back_to_naive = true;
    }

    const Obs fallback = last_observed(context);
    if (!fallback) throw DataError("seasonal_naive: context has no observed values");

    out.values.reserve(static_cast<std::size_t>(horizon));
    for (int h = 1; h <= horizon; ++h) {
        const std::size_t pos = context.size() - stride +
                                static_cast<std::size_t>(h - 1) % stride;
        const Obs v = latest_at_phase(context, pos, stride);
        out.values.push_back(v ? *v : *fallback);
    }
    return out;
}

std::vector<double> naive(std::span<const Obs> context, int horizon) {
    if (horizon < 1) throw ConfigError("naive: horizon must be >= 1");
    const Obs last = last_observed(context);
    if (!last) throw DataError("naive: context has no observed values");
    return std::vector<double>(static_cast<std::size_t>(horizon), *last);
}

QuantileForecast as_quantile_forecast(std::span<const double> point,
                                      std::span<const double> levels,
                                      std::string id) {
    QuantileForecast out;
    out.id = std::move(id);
    out.levels.assign(levels.begin(), levels.end());
    std::sort(out.levels.begin(), out.levels.end());
    out.values.assign(out.levels.size(),
                      std::vector<double>(point.begin(), point.end()));
    out.mean.assign(point.begin(), point.end());
    return out;
}

} // namespace tokencast
