#pragma once

#include <cstdint>
#include <random>

namespace tokencast {

/// Mixing function used to derive independent child seeds from
/// (seed, stream index) pairs. One splitmix64 step per argument.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                       std::uint64_t b = 0, std::uint64_t c = 0);

/**
 * Deterministic random source.
 *
 * The engine is std::mt19937_64 (its output sequence is pinned by the
 * standard); every distribution on top is implemented here because the
 * std:: distributions are implementation-defined and would break
 * bit-reproducibility of generated corpora.
 *
 * Parallel generation derives one Rng per work item via derive(), so
 * results do not depend on thread count or scheduling.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Child stream for work item (a, b, c) under the given seed.
    static Rng derive(std::uint64_t seed, std::uint64_t a,
                      std::uint64_t b = 0, std::uint64_t c = 0) {
        return Rng(mix_seed(seed, a, b, c));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53 random bits.
    double uniform01();

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos();

    /// Uniform real on [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer on {lo, ..., hi} inclusive, bias-free (rejection).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Standard normal via Box-Muller (cosine branch).
    double normal();

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 handled by boosting.
    double gamma(double shape);

private:
    std::mt19937_64 engine_;
};

} // namespace tokencast
