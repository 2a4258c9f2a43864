#pragma once

#include <span>
#include <vector>

#include "tokencast/common.hpp"

namespace tokencast {

/**
 * Quantization grid and sequence-length settings.
 *
 * Defaults: 4094 uniform bins with centers spanning [-15, 15], context
 * length 512, prediction length 64. Scaled values outside the center
 * range saturate into the extreme bins instead of erroring.
 */
struct TokenizerConfig {
    int num_bins = 4094;
    double low_center = -15.0;
    double high_center = 15.0;
    int context_length = 512;
    int prediction_length = 64;

    void validate() const;
};

/// Token layout: PAD = 0, EOS = 1, bin j in {1..B} <-> token j + 1.
struct Vocabulary {
    TokenId pad_id = 0;
    TokenId eos_id = 1;
    TokenId bin_offset = 2;
    int num_bins = 4094;

    int size() const { return num_bins + 2; }

    bool is_bin_token(TokenId t) const {
        return t >= bin_offset && t < bin_offset + num_bins;
    }
    TokenId token_for_bin(int bin) const;
    int bin_for_token(TokenId t) const;
};

/// Mean-scaled values; missing entries pass through untouched.
struct ScaledSeries {
    std::vector<Obs> values;
    double scale = 1.0;
};

/// Token sequence plus the scale needed to map forecasts back to
/// original units.
struct TokenSeq {
    std::vector<TokenId> tokens;
    double scale = 1.0;
};

/// Uniform bin centers and the midpoint edges separating them.
struct BinGeometry {
    std::vector<double> centers; // size B, strictly increasing
    std::vector<double> edges;   // size B-1, edges[i] between centers i and i+1
};

BinGeometry bin_geometry(const TokenizerConfig& cfg);

/**
 * Divides by the mean absolute value of the non-missing entries.
 * Degenerate inputs (all missing, or all zeros) fall back to scale 1 so
 * zero series stay representable and no division by zero can occur.
 */
ScaledSeries mean_scale(std::span<const Obs> values);

class Tokenizer {
public:
    explicit Tokenizer(TokenizerConfig cfg = {});

    const TokenizerConfig& config() const { return cfg_; }
    const Vocabulary& vocab() const { return vocab_; }
    const BinGeometry& geometry() const { return geom_; }

    /// Bin index in {1..B} for a finite x: j such that b_{j-1} <= x < b_j
    /// with b_0 = -inf and b_B = +inf. Saturates at the extremes.
    int quantize(double x) const;

    /// Center c_j of bin j in {1..B}.
    double dequantize(int bin) const;

    /// Scales and quantizes the last min(len, C) observations; missing
    /// values become PAD. No padding to a fixed length.
    TokenSeq tokenize_window(std::span<const Obs> values) const;

    /// tokenize_window, then left-pads with PAD to exactly C tokens.
    TokenSeq tokenize_context(std::span<const Obs> values) const;

    /// Maps bin tokens back through bin centers and multiplies by scale.
    /// PAD or EOS in the input is a contract violation (DataError).
    std::vector<double> detokenize(std::span<const TokenId> tokens, double scale) const;

private:
    TokenizerConfig cfg_;
    Vocabulary vocab_;
    BinGeometry geom_;
};

/// Appends the EOS token; used when building training labels.
std::vector<TokenId> append_eos(std::vector<TokenId> tokens, const Vocabulary& vocab);

} // namespace tokencast
