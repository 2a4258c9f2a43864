#include "tokencast/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tokencast {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                       std::uint64_t b, std::uint64_t c) {
    std::uint64_t state = seed;
    std::uint64_t out = splitmix64(state);
    state ^= a;
    out ^= splitmix64(state);
    state ^= b;
    out ^= splitmix64(state);
    state ^= c;
    out ^= splitmix64(state);
    return out;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next_u64()); // full 64-bit range
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % range;
    std::uint64_t draw;
    do {
        draw = next_u64();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % range);
}

double Rng::normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
        // Boost: Gamma(a) = Gamma(a + 1) * U^(1/a).
        const double g = gamma(shape + 1.0);
        const double u = uniform_pos();
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

} // namespace tokencast
