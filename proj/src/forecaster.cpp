#include "tokencast/forecaster.hpp"

#include <algorithm>
#include <cmath>

#include "tokencast/rng.hpp"

namespace tokencast {

std::vector<double> default_quantile_levels() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

namespace {

TokenId draw_bin_token(std::span<const double> probs, const Vocabulary& vocab,
                       Rng& rng) {
    double total = 0.0;
    for (TokenId t = vocab.bin_offset; t < static_cast<TokenId>(probs.size()); ++t) {
        total += probs[static_cast<std::size_t>(t)];
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericalError("forecast: model assigns no mass to bin tokens");
    const double target = rng.uniform01() * total;
    double cum = 0.0;
    TokenId last_positive = -1;
    for (TokenId t = vocab.bin_offset; t < static_cast<TokenId>(probs.size()); ++t) {
        const double p = probs[static_cast<std::size_t>(t)];
        if (p > 0.0) last_positive = t;
        cum += p;
        if (cum > target) return t;
    }
    return last_positive; // rounding fell off the end; take the last mass
}

} // namespace

ForecastSamples forecast(const NextTokenModel& model, const TimeSeries& series,
                         int horizon, int num_samples, const Tokenizer& tokenizer,
                         std::uint64_t seed) {
    if (horizon < 1) throw ConfigError("forecast: horizon must be >= 1");
    if (num_samples < 1) throw ConfigError("forecast: num_samples must be >= 1");
    if (model.vocab_size() != tokenizer.vocab().size())
        throw ConfigError("forecast: model vocabulary does not match the tokenizer");

    const TokenSeq context = tokenizer.tokenize_context(series.values);
    const Vocabulary& vocab = tokenizer.vocab();
    const std::size_t window = static_cast<std::size_t>(tokenizer.config().context_length);

    ForecastSamples out;
    out.id = series.id;
    out.scale = context.scale;
    out.samples.resize(static_cast<std::size_t>(num_samples));

    for (int path = 0; path < num_samples; ++path) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(path));
        std::vector<TokenId> running = context.tokens;
        std::vector<TokenId> drawn;
        drawn.reserve(static_cast<std::size_t>(horizon));
        for (int h = 0; h < horizon; ++h) {
            const std::span<const TokenId> view(
                running.data() + (running.size() > window ? running.size() - window : 0),
                std::min(running.size(), window));
            const std::vector<double> probs = model.probs(view);
            const TokenId token = draw_bin_token(probs, vocab, rng);
            drawn.push_back(token);
            running.push_back(token);
        }
        out.samples[static_cast<std::size_t>(path)] =
            tokenizer.detokenize(drawn, context.scale);
    }
    return out;
}

QuantileForecast samples_to_quantiles(const ForecastSamples& samples,
                                      std::span<const double> levels) {
    if (samples.samples.empty())
        throw DataError("quantiles: no sample paths");
    for (const double level : levels) {
        if (!(level > 0.0 && level < 1.0))
            throw ConfigError("quantiles: levels must lie strictly inside (0, 1)");
    }
    const std::size_t horizon = samples.samples.front().size();
    for (const std::vector<double>& path : samples.samples) {
        if (path.size() != horizon)
            throw DataError("quantiles: ragged sample matrix");
    }

    QuantileForecast out;
    out.id = samples.id;
    out.levels.assign(levels.begin(), levels.end());
    std::sort(out.levels.begin(), out.levels.end());
    out.values.assign(out.levels.size(), std::vector<double>(horizon));
    out.mean.assign(horizon, 0.0);

    std::vector<double> column(samples.samples.size());
    for (std::size_t step = 0; step < horizon; ++step) {
        for (std::size_t p = 0; p < samples.samples.size(); ++p) {
            column[p] = samples.samples[p][step];
        }
        std::sort(column.begin(), column.end());
        double total = 0.0;
        for (const double v : column) total += v;
        out.mean[step] = total / static_cast<double>(column.size());

        for (std::size_t li = 0; li < out.levels.size(); ++li) {
            const double pos =
                static_cast<double>(column.size() - 1) * out.levels[li];
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, column.size() - 1);
            const double frac = pos - static_cast<double>(lo);
            out.values[li][step] = column[lo] + frac * (column[hi] - column[lo]);
        }
        // Guard the per-step monotonicity invariant against any rounding.
        std::vector<double> slice(out.levels.size());
        for (std::size_t li = 0; li < out.levels.size(); ++li) slice[li] = out.values[li][step];
        std::sort(slice.begin(), slice.end());
        for (std::size_t li = 0; li < out.levels.size(); ++li) out.values[li][step] = slice[li];
    }
    return out;
}

} // namespace tokencast
