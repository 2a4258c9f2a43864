#include "tokencast/tokenizer.hpp"

#include <algorithm>
#include <cmath>

namespace tokencast {

void TokenizerConfig::validate() const {
    if (num_bins < 2)
        throw ConfigError("tokenizer: num_bins must be >= 2");
    if (!(low_center < high_center))
        throw ConfigError("tokenizer: low_center must be < high_center");
    if (!std::isfinite(low_center) || !std::isfinite(high_center))
        throw ConfigError("tokenizer: bin range must be finite");
    if (context_length < 1)
        throw ConfigError("tokenizer: context_length must be >= 1");
    if (prediction_length < 1)
        throw ConfigError("tokenizer: prediction_length must be >= 1");
}

TokenId Vocabulary::token_for_bin(int bin) const {
    if (bin < 1 || bin > num_bins)
        throw DataError("bin index " + std::to_string(bin) + " outside {1.." +
                        std::to_string(num_bins) + "}");
    return static_cast<TokenId>(bin + bin_offset - 1);
}

int Vocabulary::bin_for_token(TokenId t) const {
    if (!is_bin_token(t))
        throw DataError("token " + std::to_string(t) + " is not a bin token");
    return static_cast<int>(t - bin_offset + 1);
}

BinGeometry bin_geometry(const TokenizerConfig& cfg) {
    cfg.validate();
    const int b = cfg.num_bins;
    BinGeometry geom;
    geom.centers.resize(static_cast<std::size_t>(b));
    // Affine blend is exact at both endpoints, unlike c1 + i*step.
    for (int i = 0; i < b; ++i) {
        geom.centers[static_cast<std::size_t>(i)] =
            (cfg.low_center * (b - 1 - i) + cfg.high_center * i) / (b - 1);
    }
    geom.edges.resize(static_cast<std::size_t>(b - 1));
    for (int i = 0; i + 1 < b; ++i) {
        geom.edges[static_cast<std::size_t>(i)] =
            0.5 * (geom.centers[static_cast<std::size_t>(i)] +
                   geom.centers[static_cast<std::size_t>(i) + 1]);
    }
    return geom;
}

ScaledSeries mean_scale(std::span<const Obs> values) {
    if (values.empty()) throw DataError("mean_scale: empty input");
    double sum_abs = 0.0;
    std::size_t observed = 0;
    for (const Obs& v : values) {
        if (v) {
            sum_abs += std::abs(*v);
            ++observed;
        }
    }
    double scale = observed > 0 ? sum_abs / static_cast<double>(observed) : 0.0;
    if (!(scale > 0.0)) scale = 1.0;
    ScaledSeries out;
    out.scale = scale;
    out.values.reserve(values.size());
    for (const Obs& v : values) {
        out.values.push_back(v ? Obs(*v / scale) : Obs());
    }
    return out;
}

Tokenizer::Tokenizer(TokenizerConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    vocab_.num_bins = cfg_.num_bins;
    geom_ = bin_geometry(cfg_);
}

int Tokenizer::quantize(double x) const {
    if (!std::isfinite(x))
        throw DataError("quantize: non-finite value");
    // Bin j covers [b_{j-1}, b_j); an exact edge belongs to the bin above.
    const auto it = std::upper_bound(geom_.edges.begin(), geom_.edges.end(), x);
    return static_cast<int>(it - geom_.edges.begin()) + 1;
}

double Tokenizer::dequantize(int bin) const {
    if (bin < 1 || bin > cfg_.num_bins)
        throw DataError("dequantize: bin index " + std::to_string(bin) +
                        " outside {1.." + std::to_string(cfg_.num_bins) + "}");
    return geom_.centers[static_cast<std::size_t>(bin - 1)];
}

TokenSeq Tokenizer::tokenize_window(std::span<const Obs> values) const {
    if (values.empty()) throw DataError("tokenize: empty context");
    const std::size_t window = std::min(values.size(),
                                        static_cast<std::size_t>(cfg_.context_length));
    const std::span<const Obs> tail = values.subspan(values.size() - window);
    const ScaledSeries scaled = mean_scale(tail);
    TokenSeq out;
    out.scale = scaled.scale;
    out.tokens.reserve(window);
    for (const Obs& v : scaled.values) {
        out.tokens.push_back(v ? vocab_.token_for_bin(quantize(*v)) : vocab_.pad_id);
    }
    return out;
}

TokenSeq Tokenizer::tokenize_context(std::span<const Obs> values) const {
    TokenSeq windowed = tokenize_window(values);
    const std::size_t c = static_cast<std::size_t>(cfg_.context_length);
    TokenSeq out;
    out.scale = windowed.scale;
    out.tokens.assign(c - windowed.tokens.size(), vocab_.pad_id);
    out.tokens.insert(out.tokens.end(), windowed.tokens.begin(), windowed.tokens.end());
    return out;
}

std::vector<double> Tokenizer::detokenize(std::span<const TokenId> tokens,
                                          double scale) const {
    std::vector<double> out;
    out.reserve(tokens.size());
    for (const TokenId t : tokens) {
        if (!vocab_.is_bin_token(t))
            throw DataError("detokenize: token " + std::to_string(t) +
                            " is PAD/EOS, not a bin token");
        out.push_back(dequantize(vocab_.bin_for_token(t)) * scale);
    }
    return out;
}

std::vector<TokenId> append_eos(std::vector<TokenId> tokens, const Vocabulary& vocab) {
    tokens.push_back(vocab.eos_id);
    return tokens;
}

} // namespace tokencast
