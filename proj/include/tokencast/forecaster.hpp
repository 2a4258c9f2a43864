#pragma once

#include <span>
#include <string>
#include <vector>

#include "tokencast/models.hpp"
#include "tokencast/series.hpp"
#include "tokencast/tokenizer.hpp"

namespace tokencast {

/// Sampled future trajectories in original units.
struct ForecastSamples {
    std::string id;
    std::vector<std::vector<double>> samples; // num_samples x horizon
    double scale = 1.0;
};

/// Per-level quantile trajectories plus the sample mean.
struct QuantileForecast {
    std::string id;
    std::vector<double> levels;               // sorted, in (0, 1)
    std::vector<std::vector<double>> values;  // levels x horizon
    std::vector<double> mean;                 // horizon
};

/// The evaluation grid {0.1, 0.2, ..., 0.9}.
std::vector<double> default_quantile_levels();

/**
 * Autoregressive sampling: tokenizes the series as context, then draws
 * `num_samples` trajectories of `horizon` tokens each. PAD and EOS are
 * masked out of every predicted distribution (renormalized) so each
 * step yields a numeric value; the context slides to keep the most
 * recent C tokens. Path p uses the rng stream derived from (seed, p).
 */
ForecastSamples forecast(const NextTokenModel& model, const TimeSeries& series,
                         int horizon, int num_samples, const Tokenizer& tokenizer,
                         std::uint64_t seed);

/// Empirical quantiles per horizon step, linear interpolation between
/// order statistics at position (n - 1) * level; mean is the arithmetic
/// sample mean. Level values are sorted per step, so the output is
/// monotone in the level by construction.
QuantileForecast samples_to_quantiles(const ForecastSamples& samples,
                                      std::span<const double> levels);

} // namespace tokencast
