#include "tokencast/tsmixup.hpp"

#include <algorithm>

#include "tokencast/parallel.hpp"
#include "tokencast/tokenizer.hpp"

namespace tokencast {

namespace {

// Longest run of consecutive non-missing values in the series.
std::size_t usable_length(const TimeSeries& ts) {
    std::size_t best = 0;
    std::size_t run = 0;
    for (const Obs& v : ts.values) {
        run = v ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

} // namespace

void TSMixupConfig::validate() const {
    if (max_mix < 1) throw ConfigError("tsmixup: max_mix must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("tsmixup: alpha must be > 0");
    if (min_length < 1) throw ConfigError("tsmixup: min_length must be >= 1");
    if (min_length > max_length)
        throw ConfigError("tsmixup: min_length must be <= max_length");
}

std::vector<double> sample_dirichlet(int k, double alpha, Rng& rng) {
    if (k < 1) throw ConfigError("sample_dirichlet: k must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("sample_dirichlet: alpha must be > 0");
    std::vector<double> weights(static_cast<std::size_t>(k));
    double total = 0.0;
    for (double& w : weights) {
        w = rng.gamma(alpha);
        total += w;
    }
    if (!(total > 0.0)) {
        // All draws underflowed to zero; fall back to uniform weights.
        std::fill(weights.begin(), weights.end(), 1.0 / k);
        return weights;
    }
    for (double& w : weights) w /= total;
    return weights;
}

std::vector<double> tsmixup_sample(std::span<const Dataset> datasets,
                                   const TSMixupConfig& cfg, Rng& rng) {
    cfg.validate();
    if (datasets.empty()) throw ConfigError("tsmixup: no datasets");

    // Cap the length draw at the longest missing-free run available, so
    // every drawn l admits at least one window somewhere.
    std::size_t longest = 0;
    for (const Dataset& d : datasets) {
        for (const TimeSeries& ts : d.series) {
            longest = std::max(longest, usable_length(ts));
        }
    }
    if (longest < static_cast<std::size_t>(cfg.min_length))
        throw ConfigError("tsmixup: no dataset contains a missing-free window of " +
                          std::to_string(cfg.min_length) + " values");
    const std::int64_t max_len =
        std::min<std::int64_t>(cfg.max_length, static_cast<std::int64_t>(longest));

    const int k = static_cast<int>(rng.uniform_int(1, cfg.max_mix));
    const std::size_t len =
        static_cast<std::size_t>(rng.uniform_int(cfg.min_length, max_len));

    // One window draw: dataset uniform over datasets (never weighted by
    // series count), then series and offset uniform within it; series
    // that are too short or windows hitting a missing value are redrawn
    // within the same dataset before the dataset itself is given up on.
    const auto draw_window = [&]() -> std::vector<double> {
        constexpr int kDatasetRetries = 50;
        constexpr int kSeriesRetries = 200;
        for (int d_attempt = 0; d_attempt < kDatasetRetries; ++d_attempt) {
            const Dataset& d = datasets[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(datasets.size()) - 1))];
            if (d.series.empty()) continue;
            for (int s_attempt = 0; s_attempt < kSeriesRetries; ++s_attempt) {
                const TimeSeries& ts = d.series[static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(d.series.size()) - 1))];
                if (ts.values.size() < len) continue;
                const std::size_t start = static_cast<std::size_t>(rng.uniform_int(
                    0, static_cast<std::int64_t>(ts.values.size() - len)));
                const std::span<const Obs> window(ts.values.data() + start, len);
                if (std::any_of(window.begin(), window.end(),
                                [](const Obs& v) { return !v.has_value(); }))
                    continue;
                const ScaledSeries scaled = mean_scale(window);
                std::vector<double> w(len);
                for (std::size_t t = 0; t < len; ++t) w[t] = *scaled.values[t];
                return w;
            }
        }
        throw DataError("tsmixup: could not find a missing-free window of length " +
                        std::to_string(len));
    };

    std::vector<std::vector<double>> windows;
    windows.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) windows.push_back(draw_window());

    const std::vector<double> weights = sample_dirichlet(k, cfg.alpha, rng);
    // First term by multiplication (1.0 * x == x bitwise), so the k = 1
    // path reproduces the scaled window exactly.
    std::vector<double> out(len);
    for (std::size_t t = 0; t < len; ++t) out[t] = weights[0] * windows[0][t];
    for (std::size_t i = 1; i < windows.size(); ++i) {
        for (std::size_t t = 0; t < len; ++t) out[t] += weights[i] * windows[i][t];
    }
    return out;
}

std::vector<std::vector<double>> generate_tsmixup_corpus(
    std::span<const Dataset> datasets, const TSMixupConfig& cfg,
    int count, std::uint64_t seed, int threads) {
    cfg.validate();
    if (count < 0) throw ConfigError("tsmixup: count must be >= 0");
    std::vector<std::vector<double>> corpus(static_cast<std::size_t>(count));
    parallel_for(corpus.size(), threads, [&](std::size_t i) {
        Rng rng = Rng::derive(seed, i);
        corpus[i] = tsmixup_sample(datasets, cfg, rng);
    });
    return corpus;
}

} // namespace tokencast
