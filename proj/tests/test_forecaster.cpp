#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "tokencast/forecaster.hpp"
#include "tokencast/models.hpp"

using namespace tokencast;
using tokencast::test::obs;

namespace {

Tokenizer small_tokenizer(int num_bins = 64, int context_length = 16) {
    TokenizerConfig cfg;
    cfg.num_bins = num_bins;
    cfg.context_length = context_length;
    cfg.prediction_length = 4;
    return Tokenizer(cfg);
}

// Puts all probability on one fixed bin token.
struct ConstantModel : NextTokenModel {
    int vocab;
    TokenId token;
    ConstantModel(int vocab_size, TokenId t) : vocab(vocab_size), token(t) {}
    int vocab_size() const override { return vocab; }
    std::vector<double> probs(std::span<const TokenId>) const override {
        std::vector<double> p(static_cast<std::size_t>(vocab), 0.0);
        p[static_cast<std::size_t>(token)] = 1.0;
        return p;
    }
};

// Puts almost all mass on PAD/EOS and the rest uniformly on bins.
struct PadHeavyModel : NextTokenModel {
    int vocab;
    double bin_mass;
    PadHeavyModel(int vocab_size, double mass) : vocab(vocab_size), bin_mass(mass) {}
    int vocab_size() const override { return vocab; }
    std::vector<double> probs(std::span<const TokenId>) const override {
        std::vector<double> p(static_cast<std::size_t>(vocab),
                              bin_mass / static_cast<double>(vocab - 2));
        p[0] = (1.0 - bin_mass) / 2.0;
        p[1] = (1.0 - bin_mass) / 2.0;
        return p;
    }
};

TimeSeries series_of(const std::vector<double>& values, std::string id = "s") {
    TimeSeries ts;
    ts.id = std::move(id);
    ts.frequency = "D";
    ts.values = obs(values);
    return ts;
}

} // namespace

TEST_CASE("degenerate model forecasts a constant path") {
    const Tokenizer tok = small_tokenizer();
    const TokenId token = tok.vocab().token_for_bin(40);
    const ConstantModel model(tok.vocab().size(), token);
    const TimeSeries ts = series_of({2, 2, 2, 2});

    const ForecastSamples fs = forecast(model, ts, 5, 3, tok, 7);
    CHECK(fs.id == "s");
    CHECK(fs.samples.size() == 3);
    const double expected = tok.dequantize(40) * fs.scale;
    for (const auto& path : fs.samples) {
        REQUIRE(path.size() == 5);
        for (const double v : path) CHECK(v == expected);
    }
}

TEST_CASE("seeded forecasts are reproducible and vary across seeds") {
    const Tokenizer tok = small_tokenizer();
    const Vocabulary& vocab = tok.vocab();
    // A two-state markov chain over two bins.
    CountMarkov model(1, 0.5, vocab.size(), vocab.pad_id);
    std::vector<TokenId> chain;
    for (int i = 0; i < 200; ++i) {
        chain.push_back(vocab.token_for_bin(i % 2 ? 20 : 44));
    }
    model.observe(chain);

    const TimeSeries ts = series_of({1, 2, 1, 2, 1, 2, 1, 2});
    const ForecastSamples a = forecast(model, ts, 6, 4, tok, 99);
    const ForecastSamples b = forecast(model, ts, 6, 4, tok, 99);
    CHECK(a.samples == b.samples);
    const ForecastSamples c = forecast(model, ts, 6, 4, tok, 100);
    CHECK(a.samples != c.samples);
}

TEST_CASE("PAD and EOS are masked out of every draw") {
    const Tokenizer tok = small_tokenizer();
    const PadHeavyModel model(tok.vocab().size(), 1e-6);
    const TimeSeries ts = series_of({3, 4, 5, 6});
    // With PAD/EOS masked, every sampled value is a bin token value.
    const ForecastSamples fs = forecast(model, ts, 8, 5, tok, 3);
    for (const auto& path : fs.samples) {
        for (const double v : path) CHECK(std::isfinite(v));
    }

    const PadHeavyModel degenerate(tok.vocab().size(), 0.0);
    CHECK_THROWS_AS(forecast(degenerate, ts, 2, 1, tok, 3), NumericalError);
}

TEST_CASE("forecast scale equivariance with shared seeds") {
    const Tokenizer tok = small_tokenizer();
    const Vocabulary& vocab = tok.vocab();
    CountMarkov model(1, 0.1, vocab.size(), vocab.pad_id);
    std::vector<TokenId> chain;
    for (int i = 0; i < 300; ++i) {
        chain.push_back(vocab.token_for_bin(10 + (i * 7) % 40));
    }
    model.observe(chain);

    const std::vector<double> base = {1.5, 2.25, 0.75, 3.0, 1.0, 2.0};
    const double alpha = 37.5;
    std::vector<double> scaled;
    for (const double v : base) scaled.push_back(v * alpha);

    const ForecastSamples fa = forecast(model, series_of(base), 6, 4, tok, 11);
    const ForecastSamples fb = forecast(model, series_of(scaled), 6, 4, tok, 11);
    REQUIRE(fa.samples.size() == fb.samples.size());
    for (std::size_t p = 0; p < fa.samples.size(); ++p) {
        for (std::size_t h = 0; h < fa.samples[p].size(); ++h) {
            CHECK(fb.samples[p][h] ==
                  doctest::Approx(alpha * fa.samples[p][h]).epsilon(1e-14));
        }
    }
}

TEST_CASE("linear softmax models drive the sampler too") {
    TokenizerConfig cfg;
    cfg.num_bins = 30;
    cfg.context_length = 12;
    cfg.prediction_length = 4;
    const Tokenizer tok(cfg);
    Rng rng(81);
    LinearSoftmax model(3, tok.vocab().size(), tok.vocab().pad_id);
    for (double& w : model.theta()) w = rng.uniform(-0.3, 0.3);

    const TimeSeries ts = series_of({4, 5, 6, 5, 4, 5, 6, 5});
    const ForecastSamples a = forecast(model, ts, 6, 8, tok, 17);
    const ForecastSamples b = forecast(model, ts, 6, 8, tok, 17);
    CHECK(a.samples == b.samples);
    for (const auto& path : a.samples) {
        for (const double v : path) CHECK(std::isfinite(v));
    }
    const QuantileForecast qf = samples_to_quantiles(a, default_quantile_levels());
    CHECK(qf.mean.size() == 6);
}

TEST_CASE("quantiles: identical samples, odd-count median, interpolation") {
    ForecastSamples fs;
    fs.id = "q";
    fs.samples = {{5.0, 1.0}, {5.0, 2.0}, {5.0, 3.0}, {5.0, 4.0}, {5.0, 5.0}};
    const std::vector<double> levels = {0.1, 0.5, 0.9};
    const QuantileForecast qf = samples_to_quantiles(fs, levels);

    // Step 0: all samples identical; every level equals that value.
    for (std::size_t li = 0; li < levels.size(); ++li) CHECK(qf.values[li][0] == 5.0);
    // Step 1: {1..5}, median is 3.
    CHECK(qf.values[1][1] == 3.0);
    CHECK(qf.mean[1] == doctest::Approx(3.0));

    // Four samples {1,2,3,4} at level 0.1: position 0.3 -> 1.3.
    ForecastSamples four;
    four.id = "f";
    four.samples = {{1.0}, {2.0}, {3.0}, {4.0}};
    const QuantileForecast qf4 = samples_to_quantiles(four, std::vector<double>{0.1});
    CHECK(qf4.values[0][0] == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("quantile levels are monotone per step") {
    Rng rng(55);
    ForecastSamples fs;
    fs.id = "m";
    for (int p = 0; p < 20; ++p) {
        std::vector<double> path;
        for (int h = 0; h < 12; ++h) path.push_back(rng.uniform(-100, 100));
        fs.samples.push_back(std::move(path));
    }
    const QuantileForecast qf = samples_to_quantiles(fs, default_quantile_levels());
    for (std::size_t h = 0; h < 12; ++h) {
        for (std::size_t li = 1; li < qf.levels.size(); ++li) {
            CHECK(qf.values[li][h] >= qf.values[li - 1][h]);
        }
    }
}

TEST_CASE("quantiles input validation") {
    ForecastSamples empty;
    empty.id = "e";
    CHECK_THROWS_AS(samples_to_quantiles(empty, default_quantile_levels()), DataError);

    ForecastSamples ragged;
    ragged.id = "r";
    ragged.samples = {{1.0, 2.0}, {1.0}};
    CHECK_THROWS_AS(samples_to_quantiles(ragged, default_quantile_levels()), DataError);

    ForecastSamples ok;
    ok.id = "o";
    ok.samples = {{1.0}};
    CHECK_THROWS_AS(samples_to_quantiles(ok, std::vector<double>{0.0}), ConfigError);
    CHECK_THROWS_AS(samples_to_quantiles(ok, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("forecast input validation") {
    const Tokenizer tok = small_tokenizer();
    const ConstantModel model(tok.vocab().size(), tok.vocab().token_for_bin(1));
    const TimeSeries ts = series_of({1, 2, 3});
    CHECK_THROWS_AS(forecast(model, ts, 0, 1, tok, 1), ConfigError);
    CHECK_THROWS_AS(forecast(model, ts, 1, 0, tok, 1), ConfigError);

    const ConstantModel wrong_vocab(10, 2);
    CHECK_THROWS_AS(forecast(wrong_vocab, ts, 1, 1, tok, 1), ConfigError);

    const TimeSeries empty = series_of({});
    CHECK_THROWS_AS(forecast(model, empty, 1, 1, tok, 1), DataError);
}
