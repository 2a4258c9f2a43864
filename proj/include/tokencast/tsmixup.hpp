#pragma once

#include <span>
#include <vector>

#include "tokencast/rng.hpp"
#include "tokencast/series.hpp"

namespace tokencast {

/// Mixup augmentation knobs: up to max_mix series are combined with
/// Dirichlet(alpha) weights; the output length is uniform on
/// [min_length, max_length].
struct TSMixupConfig {
    int max_mix = 3;
    double alpha = 1.5;
    int min_length = 128;
    int max_length = 2048;

    void validate() const;
};

/// k weights on the simplex: independent Gamma(alpha, 1) draws,
/// normalized to sum to one.
std::vector<double> sample_dirichlet(int k, double alpha, Rng& rng);

/**
 * One augmented series: draws k ~ U{1..K} and a length l, samples k
 * mean-scaled windows of length l across the datasets, and returns
 * their convex combination. Windows containing missing values are
 * redrawn (bounded retries).
 */
std::vector<double> tsmixup_sample(std::span<const Dataset> datasets,
                                   const TSMixupConfig& cfg, Rng& rng);

/// n independent draws; draw i uses the rng stream derived from
/// (seed, i), so the corpus is identical for any worker count.
std::vector<std::vector<double>> generate_tsmixup_corpus(
    std::span<const Dataset> datasets, const TSMixupConfig& cfg,
    int count, std::uint64_t seed, int threads = 1);

} // namespace tokencast
