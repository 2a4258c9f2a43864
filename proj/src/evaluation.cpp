#include "tokencast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tokencast {

void EvalConfig::validate() const {
    if (levels.empty()) throw ConfigError("eval: no quantile levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] < 1.0))
            throw ConfigError("eval: levels must lie strictly inside (0, 1)");
        if (i > 0 && !(levels[i] > levels[i - 1]))
            throw ConfigError("eval: levels must be strictly increasing");
    }
    if (baseline.empty()) throw ConfigError("eval: baseline name is empty");
}

double quantile_loss(double q, double x, double alpha) {
    return x > q ? alpha * (x - q) : (1.0 - alpha) * (q - x);
}

namespace {

std::size_t level_index(const QuantileForecast& forecast, double level) {
    for (std::size_t i = 0; i < forecast.levels.size(); ++i) {
        if (std::abs(forecast.levels[i] - level) < 1e-12) return i;
    }
    throw DataError("forecast '" + forecast.id + "' has no quantile level " +
                    std::to_string(level));
}

} // namespace

double wql(std::span<const QuantileForecast> forecasts,
           std::span<const std::vector<Obs>> actuals,
           std::span<const double> levels) {
    if (forecasts.size() != actuals.size())
        throw DataError("wql: forecast/actual count mismatch");
    if (levels.empty()) throw ConfigError("wql: no quantile levels");

    double denom = 0.0;
    for (std::size_t s = 0; s < forecasts.size(); ++s) {
        if (!forecasts[s].values.empty() &&
            forecasts[s].values.front().size() != actuals[s].size())
            throw DataError("wql: horizon mismatch for series '" + forecasts[s].id + "'");
        for (const Obs& x : actuals[s]) {
            if (x) denom += std::abs(*x);
        }
    }
    if (!(denom > 0.0))
        throw NumericalError("wql: undefined, sum of |actual| is zero");

    double mean_over_levels = 0.0;
    for (const double level : levels) {
        double numer = 0.0;
        for (std::size_t s = 0; s < forecasts.size(); ++s) {
            const std::vector<double>& q = forecasts[s].values[level_index(forecasts[s], level)];
            for (std::size_t t = 0; t < actuals[s].size(); ++t) {
                if (actuals[s][t]) numer += quantile_loss(q[t], *actuals[s][t], level);
            }
        }
        mean_over_levels += 2.0 * numer / denom;
    }
    return mean_over_levels / static_cast<double>(levels.size());
}

std::optional<double> mase(std::span<const double> point, std::span<const Obs> actual,
                           std::span<const Obs> insample, int season) {
    if (season < 1) throw ConfigError("mase: season must be >= 1");
    if (point.size() != actual.size())
        throw DataError("mase: point/actual length mismatch");
    if (point.empty()) throw DataError("mase: empty horizon");

    const std::size_t c = insample.size();
    const std::size_t s = static_cast<std::size_t>(season);
    if (c <= s) return std::nullopt;

    double denom = 0.0;
    bool any_pair = false;
    for (std::size_t t = 0; t + s < c; ++t) {
        if (insample[t] && insample[t + s]) {
            denom += std::abs(*insample[t] - *insample[t + s]);
            any_pair = true;
        }
    }
    if (!any_pair || !(denom > 0.0)) return std::nullopt;

    double numer = 0.0;
    for (std::size_t t = 0; t < point.size(); ++t) {
        if (actual[t]) numer += std::abs(point[t] - *actual[t]);
    }
    const double scale = static_cast<double>(c - s) / static_cast<double>(point.size());
    return scale * numer / denom;
}

std::vector<double> median_forecast(const QuantileForecast& forecast) {
    return forecast.values[level_index(forecast, 0.5)];
}

std::optional<DatasetMase> dataset_mase(std::span<const QuantileForecast> forecasts,
                                        std::span<const SplitSeries> tasks,
                                        int season) {
    if (forecasts.size() != tasks.size())
        throw DataError("mase: forecast/task count mismatch");
    DatasetMase out;
    double total = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::optional<double> value =
            mase(median_forecast(forecasts[i]), tasks[i].target,
                 tasks[i].context.values, season);
        if (value) {
            total += *value;
            ++out.used;
        } else {
            ++out.skipped;
        }
    }
    if (out.used == 0) return std::nullopt;
    out.value = total / static_cast<double>(out.used);
    return out;
}

ScoreTable relative_scores(const ScoreTable& scores, const std::string& baseline) {
    std::set<std::string> models;
    for (const auto& [dataset, by_model] : scores) {
        for (const auto& [model, value] : by_model) models.insert(model);
    }
    ScoreTable out;
    for (const auto& [dataset, by_model] : scores) {
        const auto base = by_model.find(baseline);
        if (base == by_model.end())
            throw DataError("relative scores: baseline '" + baseline +
                            "' missing on dataset '" + dataset + "'");
        if (!(base->second > 0.0))
            throw DataError("relative scores: baseline score is not positive on '" +
                            dataset + "'");
        for (const std::string& model : models) {
            const auto it = by_model.find(model);
            // A model with no score on this dataset scores like the baseline.
            out[dataset][model] = it != by_model.end() ? it->second / base->second : 1.0;
        }
    }
    return out;
}

double agg_geometric_mean(std::span<const double> values) {
    if (values.empty()) throw DataError("geometric mean: no values");
    double log_sum = 0.0;
    for (const double v : values) {
        if (!(v > 0.0))
            throw DataError("geometric mean: nonpositive value " + std::to_string(v));
        log_sum += std::log(v);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

std::map<std::string, double> average_rank(const ScoreTable& scores) {
    std::set<std::string> models;
    for (const auto& [dataset, by_model] : scores) {
        for (const auto& [model, value] : by_model) models.insert(model);
    }
    std::map<std::string, double> rank_sum;
    for (const std::string& m : models) rank_sum[m] = 0.0;

    for (const auto& [dataset, by_model] : scores) {
        std::vector<std::pair<double, std::string>> present;
        std::vector<std::string> missing;
        for (const std::string& m : models) {
            const auto it = by_model.find(m);
            if (it != by_model.end())
                present.emplace_back(it->second, m);
            else
                missing.push_back(m);
        }
        std::sort(present.begin(), present.end());
        // Tied scores share the mean of the positions they occupy.
        std::size_t i = 0;
        while (i < present.size()) {
            std::size_t j = i;
            while (j + 1 < present.size() && present[j + 1].first == present[i].first) ++j;
            const double tied_rank = static_cast<double>(i + 1 + j + 1) / 2.0;
            for (std::size_t k = i; k <= j; ++k) rank_sum[present[k].second] += tied_rank;
            i = j + 1;
        }
        // Missing models tie for the trailing positions.
        if (!missing.empty()) {
            const double tail_rank =
                static_cast<double>(present.size() + 1 + models.size()) / 2.0;
            for (const std::string& m : missing) rank_sum[m] += tail_rank;
        }
    }
    const double n = static_cast<double>(scores.size());
    for (auto& [model, sum] : rank_sum) sum /= n;
    return rank_sum;
}

EvalReport build_report(const ScoreMap& scores, const EvalConfig& config) {
    config.validate();
    if (scores.empty()) throw DataError("report: no scores");

    EvalReport report;
    report.config = config;

    std::set<std::string> models;
    ScoreTable wql_table;
    ScoreTable mase_table;
    for (const auto& [dataset, by_model] : scores) {
        report.datasets.push_back(dataset);
        for (const auto& [model, entry] : by_model) {
            models.insert(model);
            if (entry.wql) wql_table[dataset][model] = *entry.wql;
            if (entry.mase) mase_table[dataset][model] = *entry.mase;
        }
    }
    report.models.assign(models.begin(), models.end());
    report.scores = scores;

    report.relative_wql = relative_scores(wql_table, config.baseline);
    report.relative_mase = relative_scores(mase_table, config.baseline);

    const auto rank_wql = average_rank(wql_table);
    const auto rank_mase = average_rank(mase_table);

    for (const std::string& model : report.models) {
        std::vector<double> rel_wql;
        std::vector<double> rel_mase;
        for (const std::string& dataset : report.datasets) {
            rel_wql.push_back(report.relative_wql.at(dataset).at(model));
            rel_mase.push_back(report.relative_mase.at(dataset).at(model));
        }
        ModelAggregate agg;
        agg.agg_relative_wql = agg_geometric_mean(rel_wql);
        agg.agg_relative_mase = agg_geometric_mean(rel_mase);
        agg.avg_rank_wql = rank_wql.count(model) ? rank_wql.at(model)
                                                 : static_cast<double>(models.size());
        agg.avg_rank_mase = rank_mase.count(model) ? rank_mase.at(model)
                                                   : static_cast<double>(models.size());
        report.aggregates[model] = agg;
    }
    return report;
}

std::string report_to_json(const EvalReport& report, const std::string& metadata_json) {
    nlohmann::ordered_json j;
    j["metadata"] = metadata_json.empty()
                        ? nlohmann::ordered_json::object()
                        : nlohmann::ordered_json::parse(metadata_json);
    j["baseline"] = report.config.baseline;
    j["levels"] = report.config.levels;
    j["datasets"] = report.datasets;
    j["models"] = report.models;

    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    for (const auto& [dataset, by_model] : report.scores) {
        nlohmann::ordered_json per_model = nlohmann::ordered_json::object();
        for (const auto& [model, entry] : by_model) {
            nlohmann::ordered_json cell = nlohmann::ordered_json::object();
            cell["wql"] = entry.wql ? nlohmann::ordered_json(*entry.wql)
                                    : nlohmann::ordered_json(nullptr);
            cell["mase"] = entry.mase ? nlohmann::ordered_json(*entry.mase)
                                      : nlohmann::ordered_json(nullptr);
            cell["mase_used"] = entry.mase_used;
            cell["mase_skipped"] = entry.mase_skipped;
            per_model[model] = std::move(cell);
        }
        scores[dataset] = std::move(per_model);
    }
    j["scores"] = std::move(scores);

    const auto table_json = [](const ScoreTable& table) {
        nlohmann::ordered_json out = nlohmann::ordered_json::object();
        for (const auto& [dataset, by_model] : table) {
            nlohmann::ordered_json row = nlohmann::ordered_json::object();
            for (const auto& [model, value] : by_model) row[model] = value;
            out[dataset] = std::move(row);
        }
        return out;
    };
    j["relative"] = {{"wql", table_json(report.relative_wql)},
                     {"mase", table_json(report.relative_mase)}};

    nlohmann::ordered_json aggregates = nlohmann::ordered_json::object();
    for (const auto& [model, agg] : report.aggregates) {
        aggregates[model] = {{"agg_relative_wql", agg.agg_relative_wql},
                             {"agg_relative_mase", agg.agg_relative_mase},
                             {"avg_rank_wql", agg.avg_rank_wql},
                             {"avg_rank_mase", agg.avg_rank_mase}};
    }
    j["aggregates"] = std::move(aggregates);
    return j.dump(2) + "\n";
}

namespace {

std::string format_cell(const nlohmann::json& v) {
    if (v.is_null()) return "-";
    std::ostringstream os;
    os << std::setprecision(4) << std::fixed << v.get<double>();
    return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

} // namespace

std::string render_report_table(const std::string& report_json) {
    const nlohmann::json j = nlohmann::json::parse(report_json);
    std::ostringstream out;

    const auto models = j.at("models").get<std::vector<std::string>>();
    std::size_t name_width = 5;
    for (const auto& m : models) name_width = std::max(name_width, m.size());

    out << "per-dataset scores (baseline: " << j.at("baseline").get<std::string>()
        << ")\n";
    for (const auto& [dataset, by_model] : j.at("scores").items()) {
        out << "dataset: " << dataset << "\n";
        out << "  " << pad("model", name_width) << "  " << pad("wql", 10) << "  "
            << pad("mase", 10) << "  " << pad("rel_wql", 10) << "  "
            << pad("rel_mase", 10) << "\n";
        for (const std::string& model : models) {
            if (!by_model.contains(model)) continue;
            const auto& cell = by_model.at(model);
            out << "  " << pad(model, name_width) << "  "
                << pad(format_cell(cell.at("wql")), 10) << "  "
                << pad(format_cell(cell.at("mase")), 10) << "  "
                << pad(format_cell(j.at("relative").at("wql").at(dataset).at(model)), 10)
                << "  "
                << pad(format_cell(j.at("relative").at("mase").at(dataset).at(model)), 10)
                << "\n";
        }
    }

    out << "aggregates (geometric mean of relative scores, mean rank)\n";
    out << "  " << pad("model", name_width) << "  " << pad("agg_wql", 10) << "  "
        << pad("agg_mase", 10) << "  " << pad("rank_wql", 10) << "  "
        << pad("rank_mase", 10) << "\n";
    for (const std::string& model : models) {
        const auto& agg = j.at("aggregates").at(model);
        out << "  " << pad(model, name_width) << "  "
            << pad(format_cell(agg.at("agg_relative_wql")), 10) << "  "
            << pad(format_cell(agg.at("agg_relative_mase")), 10) << "  "
            << pad(format_cell(agg.at("avg_rank_wql")), 10) << "  "
            << pad(format_cell(agg.at("avg_rank_mase")), 10) << "\n";
    }
    return out.str();
}

std::string report_to_plot_csv(const std::string& report_json) {
    const nlohmann::json j = nlohmann::json::parse(report_json);
    std::ostringstream out;
    out << "scope,dataset,model,wql,mase,rel_wql,rel_mase,agg_relative_wql,"
           "agg_relative_mase,avg_rank_wql,avg_rank_mase\n";
    const auto models = j.at("models").get<std::vector<std::string>>();
    const auto number = [](const nlohmann::json& v) {
        if (v.is_null()) return std::string();
        std::ostringstream os;
        os << std::setprecision(17) << v.get<double>();
        return os.str();
    };
    for (const auto& [dataset, by_model] : j.at("scores").items()) {
        for (const std::string& model : models) {
            if (!by_model.contains(model)) continue;
            const auto& cell = by_model.at(model);
            out << "dataset," << dataset << "," << model << ","
                << number(cell.at("wql")) << "," << number(cell.at("mase")) << ","
                << number(j.at("relative").at("wql").at(dataset).at(model)) << ","
                << number(j.at("relative").at("mase").at(dataset).at(model))
                << ",,,,\n";
        }
    }
    for (const std::string& model : models) {
        const auto& agg = j.at("aggregates").at(model);
        out << "aggregate,," << model << ",,,,,"
            << number(agg.at("agg_relative_wql")) << ","
            << number(agg.at("agg_relative_mase")) << ","
            << number(agg.at("avg_rank_wql")) << ","
            << number(agg.at("avg_rank_mase")) << "\n";
    }
    return out.str();
}

} // namespace tokencast
