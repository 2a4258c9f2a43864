#include "tokencast/series.hpp"

#include <cmath>
#include <set>

namespace tokencast {

void Dataset::validate() const {
    if (prediction_length < 1)
        throw DataError("dataset '" + name + "': prediction_length must be >= 1");
    if (seasonality < 1)
        throw DataError("dataset '" + name + "': seasonality must be >= 1");
    std::set<std::string> seen;
    for (const TimeSeries& ts : series) {
        if (!seen.insert(ts.id).second)
            throw DataError("dataset '" + name + "': duplicate series id '" + ts.id +
                            "'");
    }
    for (const TimeSeries& ts : series) {
        if (ts.values.empty())
            throw DataError("series '" + ts.id + "': empty values");
        if (ts.values.size() <= static_cast<std::size_t>(prediction_length))
            throw DataError("series '" + ts.id + "': length " +
                            std::to_string(ts.values.size()) +
                            " must exceed prediction_length " +
                            std::to_string(prediction_length));
        for (const Obs& v : ts.values) {
            if (v && !std::isfinite(*v))
                throw DataError("series '" + ts.id + "': non-finite value");
        }
    }
}

std::vector<SplitSeries> split_context_target(const Dataset& dataset) {
    dataset.validate();
    const std::size_t horizon = static_cast<std::size_t>(dataset.prediction_length);
    std::vector<SplitSeries> out;
    out.reserve(dataset.series.size());
    for (const TimeSeries& ts : dataset.series) {
        SplitSeries split;
        split.context.id = ts.id;
        split.context.frequency = ts.frequency;
        split.context.start = ts.start;
        const std::size_t cut = ts.values.size() - horizon;
        split.context.values.assign(ts.values.begin(),
                                    ts.values.begin() + static_cast<std::ptrdiff_t>(cut));
        split.target.assign(ts.values.begin() + static_cast<std::ptrdiff_t>(cut),
                            ts.values.end());
        out.push_back(std::move(split));
    }
    return out;
}

} // namespace tokencast
