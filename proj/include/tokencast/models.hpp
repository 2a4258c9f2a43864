#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tokencast/rng.hpp"
#include "tokencast/tokenizer.hpp"

namespace tokencast {

/// A categorical next-token model over the token vocabulary.
/// probs() must return a valid distribution (nonnegative, sums to 1).
class NextTokenModel {
public:
    virtual ~NextTokenModel() = default;
    virtual int vocab_size() const = 0;
    virtual std::vector<double> probs(std::span<const TokenId> context) const = 0;
};

/// One teacher-forcing example: the running context is extended by one
/// true label token per step. Labels are the horizon's bin tokens with
/// EOS appended, so their length is H + 1.
struct TrainingExample {
    std::vector<TokenId> context;
    std::vector<TokenId> labels;
};

/// Builds an example from raw values: the last `horizon` observations
/// become labels (quantized with the context window's scale), the rest
/// is tokenized as context. Returns nullopt when the series is too
/// short or a label value is missing (PAD never appears in labels).
std::optional<TrainingExample> make_training_example(std::span<const Obs> values,
                                                     int horizon,
                                                     const Tokenizer& tokenizer);

std::vector<TrainingExample> build_training_examples(
    std::span<const std::vector<Obs>> corpus, int horizon, const Tokenizer& tokenizer);

/**
 * Order-k count model with additive smoothing:
 * p(next | ctx) = (count + eps) / (total + eps * V).
 * Contexts shorter than k are left-padded with PAD.
 */
class CountMarkov : public NextTokenModel {
public:
    struct Counts {
        std::map<TokenId, std::uint64_t> next;
        std::uint64_t total = 0;
    };
    using Table = std::map<std::vector<TokenId>, Counts>;

    CountMarkov(int order, double smoothing, int vocab_size, TokenId pad_id);

    int order() const { return order_; }
    double smoothing() const { return smoothing_; }
    int vocab_size() const override { return vocab_size_; }
    const Table& table() const { return table_; }

    /// Counts every (k-gram -> next token) transition in the sequence.
    void observe(std::span<const TokenId> sequence);

    /// Restores a count entry (deserialization path).
    void insert_counts(std::vector<TokenId> context, Counts counts);

    std::vector<double> probs(std::span<const TokenId> context) const override;

private:
    std::vector<TokenId> key_for(std::span<const TokenId> context, std::size_t end) const;

    int order_;
    double smoothing_;
    int vocab_size_;
    TokenId pad_id_;
    Table table_;
};

CountMarkov fit_markov(std::span<const std::vector<TokenId>> corpus, int order,
                       double smoothing, const Vocabulary& vocab);

/**
 * Softmax regression over the concatenated one-hot encoding of the last
 * `window` context tokens. Convex in its parameters, so it trains
 * reliably with plain gradient descent; intended for small
 * vocabularies.
 */
class LinearSoftmax : public NextTokenModel {
public:
    LinearSoftmax(int window, int vocab_size, TokenId pad_id);

    int window() const { return window_; }
    int vocab_size() const override { return vocab_size_; }
    TokenId pad_id() const { return pad_id_; }

    std::vector<double> logits(std::span<const TokenId> context) const;
    std::vector<double> probs(std::span<const TokenId> context) const override;

    /// Window slot tokens for a context: its last `window` entries,
    /// left-padded with PAD.
    std::vector<TokenId> window_tokens(std::span<const TokenId> context) const;

    std::vector<double>& theta() { return theta_; }
    const std::vector<double>& theta() const { return theta_; }
    std::vector<double>& bias() { return bias_; }
    const std::vector<double>& bias() const { return bias_; }

    /// Flat index of the weight row for (slot, input token).
    std::size_t row_index(int slot, TokenId token) const {
        return (static_cast<std::size_t>(slot) * static_cast<std::size_t>(vocab_size_) +
                static_cast<std::size_t>(token)) * static_cast<std::size_t>(vocab_size_);
    }

private:
    int window_;
    int vocab_size_;
    TokenId pad_id_;
    std::vector<double> theta_; // (window * V) x V, row-major
    std::vector<double> bias_;  // V
};

/// Teacher-forcing cross entropy of one example: the sum over label
/// positions of -log p(true token | running context).
double cross_entropy_loss(const NextTokenModel& model, const TrainingExample& example);

/// Mean of the per-example losses over a batch.
double cross_entropy_loss(const NextTokenModel& model,
                          std::span<const TrainingExample> batch);

struct LinearGradient {
    std::vector<double> theta;
    std::vector<double> bias;
};

/// Analytic softmax cross-entropy gradient, averaged over the batch.
LinearGradient grad_cross_entropy(const LinearSoftmax& model,
                                  std::span<const TrainingExample> batch);

struct TrainLinearOptions {
    int window = 8;
    int epochs = 50;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
    int batch_size = 0; // 0 = full batch
};

struct TrainedLinear {
    LinearSoftmax model;
    std::vector<double> per_token_loss; // per-epoch trace on the full corpus
};

/// Gradient descent from zero parameters with the learning rate
/// annealed linearly to 0 over the run. batch_size > 0 switches to
/// mini-batch SGD with a seeded shuffle per epoch.
TrainedLinear train_linear(std::span<const TrainingExample> corpus,
                           const Vocabulary& vocab, const TrainLinearOptions& options);

/// Mean per-label-token loss over a corpus (reporting metric).
double per_token_loss(const NextTokenModel& model,
                      std::span<const TrainingExample> corpus);

// --- serialization (self-describing JSON documents) ---

std::string model_to_json(const CountMarkov& model, const TokenizerConfig& tokenizer);
std::string model_to_json(const LinearSoftmax& model, const TokenizerConfig& tokenizer);

struct LoadedModel {
    std::string kind; // "count_markov" | "linear_softmax"
    std::unique_ptr<NextTokenModel> model;
    TokenizerConfig tokenizer;
};

LoadedModel model_from_json(const std::string& text);

} // namespace tokencast
