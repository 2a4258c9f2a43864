#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tokencast/forecaster.hpp"
#include "tokencast/series.hpp"

namespace tokencast {

struct EvalConfig {
    std::vector<double> levels = default_quantile_levels();
    std::string baseline = "seasonal_naive";

    void validate() const;
};

/// Pinball loss of a predicted alpha-quantile q against observation x:
/// alpha * (x - q) when under-predicting, (1 - alpha) * (q - x) otherwise.
double quantile_loss(double q, double x, double alpha);

/**
 * Weighted quantile loss over a dataset: per level,
 * 2 * sum QL / sum |x| with both sums running jointly over every series
 * and horizon step, then the mean across levels. Missing actuals are
 * excluded from both sums. Throws NumericalError when sum |x| == 0.
 */
double wql(std::span<const QuantileForecast> forecasts,
           std::span<const std::vector<Obs>> actuals,
           std::span<const double> levels);

/**
 * Mean absolute scaled error of one series:
 * ((C - S) / H) * sum |point - actual| / sum_{t=1..C-S} |x_t - x_{t+S}|.
 * Pairs with a missing endpoint are excluded from either sum. Returns
 * nullopt when the denominator is 0 or the insample is not longer than
 * the season (the series is skipped, never imputed).
 */
std::optional<double> mase(std::span<const double> point, std::span<const Obs> actual,
                           std::span<const Obs> insample, int season);

struct DatasetMase {
    double value = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;
};

/// Arithmetic mean of the per-series MASE with skip accounting.
/// Returns nullopt when every series was skipped.
std::optional<DatasetMase> dataset_mase(std::span<const QuantileForecast> forecasts,
                                        std::span<const SplitSeries> tasks,
                                        int season);

/// Median (0.5-quantile) trajectory of a forecast; the point forecast
/// used for MASE.
std::vector<double> median_forecast(const QuantileForecast& forecast);

/// scores[dataset][model]; a missing entry means the model produced no
/// score for that dataset.
using ScoreTable = std::map<std::string, std::map<std::string, double>>;

/**
 * Divides each model's score by the baseline's score per dataset.
 * Models missing a dataset receive relative score 1.0 (the baseline's
 * own relative score). A missing or nonpositive baseline score is a
 * protocol error (DataError).
 */
ScoreTable relative_scores(const ScoreTable& scores, const std::string& baseline);

/// exp(mean log); any nonpositive input is a protocol error.
double agg_geometric_mean(std::span<const double> values);

/**
 * Mean rank per model across datasets: ascending by score, ties get the
 * mean of their positions, models missing a dataset tie for last place.
 * Ranks models that appear anywhere in the table.
 */
std::map<std::string, double> average_rank(const ScoreTable& scores);

/// Per-(dataset, model) metric values; nullopt marks an undefined score.
struct ScoreEntry {
    std::optional<double> wql;
    std::optional<double> mase;
    std::size_t mase_used = 0;
    std::size_t mase_skipped = 0;
};

using ScoreMap = std::map<std::string, std::map<std::string, ScoreEntry>>;

struct ModelAggregate {
    double agg_relative_wql = 1.0;
    double agg_relative_mase = 1.0;
    double avg_rank_wql = 1.0;
    double avg_rank_mase = 1.0;
};

struct EvalReport {
    EvalConfig config;
    std::vector<std::string> datasets;
    std::vector<std::string> models;
    ScoreMap scores;
    ScoreTable relative_wql;
    ScoreTable relative_mase;
    std::map<std::string, ModelAggregate> aggregates;
};

/// Relative scores, geometric-mean aggregates and average ranks from
/// the raw score map.
EvalReport build_report(const ScoreMap& scores, const EvalConfig& config);

/// Stable-keyed JSON document; metadata (seed, run configuration) is
/// embedded verbatim so reruns with identical inputs are byte-identical.
std::string report_to_json(const EvalReport& report, const std::string& metadata_json);

/// Aligned text table for terminals.
std::string render_report_table(const std::string& report_json);

/// Flat CSV of the per-dataset and aggregate numbers, for plotting.
std::string report_to_plot_csv(const std::string& report_json);

} // namespace tokencast
