#include "tokencast/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace tokencast {

std::optional<TrainingExample> make_training_example(std::span<const Obs> values,
                                                     int horizon,
                                                     const Tokenizer& tokenizer) {
    if (horizon < 1) throw ConfigError("training example: horizon must be >= 1");
    if (values.size() < static_cast<std::size_t>(horizon) + 1) return std::nullopt;
    const std::size_t cut = values.size() - static_cast<std::size_t>(horizon);
    const std::span<const Obs> history = values.subspan(0, cut);
    const std::span<const Obs> future = values.subspan(cut);
    if (std::any_of(future.begin(), future.end(),
                    [](const Obs& v) { return !v.has_value(); }))
        return std::nullopt; // labels must be bin tokens, never PAD
    if (std::none_of(history.begin(), history.end(),
                     [](const Obs& v) { return v.has_value(); }))
        return std::nullopt;

    TrainingExample example;
    TokenSeq ctx = tokenizer.tokenize_context(history);
    example.context = std::move(ctx.tokens);
    example.labels.reserve(future.size() + 1);
    for (const Obs& v : future) {
        example.labels.push_back(
            tokenizer.vocab().token_for_bin(tokenizer.quantize(*v / ctx.scale)));
    }
    example.labels = append_eos(std::move(example.labels), tokenizer.vocab());
    return example;
}

std::vector<TrainingExample> build_training_examples(
    std::span<const std::vector<Obs>> corpus, int horizon, const Tokenizer& tokenizer) {
    std::vector<TrainingExample> out;
    out.reserve(corpus.size());
    for (const std::vector<Obs>& values : corpus) {
        if (auto ex = make_training_example(values, horizon, tokenizer)) {
            out.push_back(std::move(*ex));
        }
    }
    return out;
}

// --- CountMarkov ---

CountMarkov::CountMarkov(int order, double smoothing, int vocab_size, TokenId pad_id)
    : order_(order), smoothing_(smoothing), vocab_size_(vocab_size), pad_id_(pad_id) {
    if (order_ < 1) throw ConfigError("markov: order must be >= 1");
    if (!(smoothing_ > 0.0)) throw ConfigError("markov: smoothing must be > 0");
    if (vocab_size_ < 2) throw ConfigError("markov: vocabulary too small");
}

std::vector<TokenId> CountMarkov::key_for(std::span<const TokenId> context,
                                          std::size_t end) const {
    std::vector<TokenId> key(static_cast<std::size_t>(order_), pad_id_);
    const std::size_t have = std::min(end, static_cast<std::size_t>(order_));
    for (std::size_t i = 0; i < have; ++i) {
        key[key.size() - have + i] = context[end - have + i];
    }
    return key;
}

void CountMarkov::observe(std::span<const TokenId> sequence) {
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        Counts& c = table_[key_for(sequence, i)];
        ++c.next[sequence[i]];
        ++c.total;
    }
}

void CountMarkov::insert_counts(std::vector<TokenId> context, Counts counts) {
    if (context.size() != static_cast<std::size_t>(order_))
        throw DataError("markov: count entry with wrong context length");
    for (const TokenId t : context) {
        if (t < 0 || t >= vocab_size_)
            throw DataError("markov: context token outside the vocabulary");
    }
    for (const auto& [token, count] : counts.next) {
        if (token < 0 || token >= vocab_size_)
            throw DataError("markov: next token outside the vocabulary");
    }
    table_[std::move(context)] = std::move(counts);
}

std::vector<double> CountMarkov::probs(std::span<const TokenId> context) const {
    std::vector<double> p(static_cast<std::size_t>(vocab_size_));
    const auto it = table_.find(key_for(context, context.size()));
    const double denom =
        smoothing_ * vocab_size_ + (it != table_.end() ? static_cast<double>(it->second.total) : 0.0);
    for (double& v : p) v = smoothing_ / denom;
    if (it != table_.end()) {
        for (const auto& [token, count] : it->second.next) {
            p[static_cast<std::size_t>(token)] =
                (static_cast<double>(count) + smoothing_) / denom;
        }
    }
    return p;
}

CountMarkov fit_markov(std::span<const std::vector<TokenId>> corpus, int order,
                       double smoothing, const Vocabulary& vocab) {
    CountMarkov model(order, smoothing, vocab.size(), vocab.pad_id);
    for (const std::vector<TokenId>& sequence : corpus) model.observe(sequence);
    return model;
}

// --- LinearSoftmax ---

LinearSoftmax::LinearSoftmax(int window, int vocab_size, TokenId pad_id)
    : window_(window), vocab_size_(vocab_size), pad_id_(pad_id) {
    if (window_ < 1) throw ConfigError("linear: window must be >= 1");
    if (vocab_size_ < 2) throw ConfigError("linear: vocabulary too small");
    theta_.assign(static_cast<std::size_t>(window_) * static_cast<std::size_t>(vocab_size_) *
                      static_cast<std::size_t>(vocab_size_),
                  0.0);
    bias_.assign(static_cast<std::size_t>(vocab_size_), 0.0);
}

std::vector<TokenId> LinearSoftmax::window_tokens(std::span<const TokenId> context) const {
    std::vector<TokenId> slots(static_cast<std::size_t>(window_), pad_id_);
    const std::size_t have = std::min(context.size(), static_cast<std::size_t>(window_));
    for (std::size_t i = 0; i < have; ++i) {
        slots[slots.size() - have + i] = context[context.size() - have + i];
    }
    return slots;
}

std::vector<double> LinearSoftmax::logits(std::span<const TokenId> context) const {
    std::vector<double> out = bias_;
    const std::vector<TokenId> slots = window_tokens(context);
    for (int slot = 0; slot < window_; ++slot) {
        const TokenId token = slots[static_cast<std::size_t>(slot)];
        if (token < 0 || token >= vocab_size_)
            throw DataError("linear: token " + std::to_string(token) +
                            " outside the vocabulary");
        const double* row = theta_.data() + row_index(slot, token);
        for (int v = 0; v < vocab_size_; ++v) out[static_cast<std::size_t>(v)] += row[v];
    }
    return out;
}

std::vector<double> LinearSoftmax::probs(std::span<const TokenId> context) const {
    std::vector<double> p = logits(context);
    const double peak = *std::max_element(p.begin(), p.end());
    double total = 0.0;
    for (double& v : p) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : p) v /= total;
    return p;
}

// --- objective ---

double cross_entropy_loss(const NextTokenModel& model, const TrainingExample& example) {
    std::vector<TokenId> running(example.context.begin(), example.context.end());
    double loss = 0.0;
    for (const TokenId label : example.labels) {
        if (label < 0 || label >= model.vocab_size())
            throw DataError("loss: label token outside the vocabulary");
        const std::vector<double> p = model.probs(running);
        const double q = p[static_cast<std::size_t>(label)];
        if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
        loss -= std::log(q);
        running.push_back(label);
    }
    return loss;
}

double cross_entropy_loss(const NextTokenModel& model,
                          std::span<const TrainingExample> batch) {
    if (batch.empty()) throw DataError("loss: empty batch");
    double total = 0.0;
    for (const TrainingExample& ex : batch) total += cross_entropy_loss(model, ex);
    return total / static_cast<double>(batch.size());
}

LinearGradient grad_cross_entropy(const LinearSoftmax& model,
                                  std::span<const TrainingExample> batch) {
    if (batch.empty()) throw DataError("gradient: empty batch");
    LinearGradient grad;
    grad.theta.assign(model.theta().size(), 0.0);
    grad.bias.assign(model.bias().size(), 0.0);
    const int vocab = model.vocab_size();

    for (const TrainingExample& ex : batch) {
        std::vector<TokenId> running(ex.context.begin(), ex.context.end());
        for (const TokenId label : ex.labels) {
            std::vector<double> g = model.probs(running); // softmax - onehot
            g[static_cast<std::size_t>(label)] -= 1.0;
            const std::vector<TokenId> slots = model.window_tokens(running);
            for (int slot = 0; slot < model.window(); ++slot) {
                double* row = grad.theta.data() +
                              model.row_index(slot, slots[static_cast<std::size_t>(slot)]);
                for (int v = 0; v < vocab; ++v) row[v] += g[static_cast<std::size_t>(v)];
            }
            for (int v = 0; v < vocab; ++v)
                grad.bias[static_cast<std::size_t>(v)] += g[static_cast<std::size_t>(v)];
            running.push_back(label);
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& v : grad.theta) v *= inv;
    for (double& v : grad.bias) v *= inv;
    return grad;
}

double per_token_loss(const NextTokenModel& model,
                      std::span<const TrainingExample> corpus) {
    double total = 0.0;
    std::size_t tokens = 0;
    for (const TrainingExample& ex : corpus) {
        total += cross_entropy_loss(model, ex);
        tokens += ex.labels.size();
    }
    if (tokens == 0) throw DataError("per_token_loss: no label tokens");
    return total / static_cast<double>(tokens);
}

TrainedLinear train_linear(std::span<const TrainingExample> corpus,
                           const Vocabulary& vocab, const TrainLinearOptions& options) {
    if (corpus.empty()) throw DataError("train_linear: empty corpus");
    if (options.epochs < 0) throw ConfigError("train_linear: epochs must be >= 0");
    if (options.learning_rate < 0.0)
        throw ConfigError("train_linear: learning_rate must be >= 0");

    TrainedLinear out{LinearSoftmax(options.window, vocab.size(), vocab.pad_id), {}};
    LinearSoftmax& model = out.model;
    Rng rng(options.seed);

    const auto apply = [&](const LinearGradient& grad, double lr) {
        for (std::size_t i = 0; i < grad.theta.size(); ++i)
            model.theta()[i] -= lr * grad.theta[i];
        for (std::size_t i = 0; i < grad.bias.size(); ++i)
            model.bias()[i] -= lr * grad.bias[i];
    };

    if (options.batch_size <= 0) {
        // Full-batch descent: one step per epoch.
        for (int epoch = 0; epoch < options.epochs; ++epoch) {
            const double lr = options.learning_rate *
                              static_cast<double>(options.epochs - epoch) /
                              static_cast<double>(options.epochs);
            apply(grad_cross_entropy(model, corpus), lr);
            const double loss = per_token_loss(model, corpus);
            if (!std::isfinite(loss))
                throw NumericalError("train_linear: non-finite loss at epoch " +
                                     std::to_string(epoch));
            out.per_token_loss.push_back(loss);
        }
        return out;
    }

    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t batches_per_epoch =
        (corpus.size() + static_cast<std::size_t>(options.batch_size) - 1) /
        static_cast<std::size_t>(options.batch_size);
    const std::size_t total_steps =
        static_cast<std::size_t>(options.epochs) * batches_per_epoch;
    std::size_t step = 0;
    std::vector<TrainingExample> batch;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        // Seeded Fisher-Yates; std::shuffle is implementation-defined.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t b = 0; b < batches_per_epoch; ++b, ++step) {
            batch.clear();
            const std::size_t begin = b * static_cast<std::size_t>(options.batch_size);
            const std::size_t end =
                std::min(begin + static_cast<std::size_t>(options.batch_size), corpus.size());
            for (std::size_t i = begin; i < end; ++i) batch.push_back(corpus[order[i]]);
            const double lr = options.learning_rate *
                              static_cast<double>(total_steps - step) /
                              static_cast<double>(total_steps);
            apply(grad_cross_entropy(model, batch), lr);
        }
        const double loss = per_token_loss(model, corpus);
        if (!std::isfinite(loss))
            throw NumericalError("train_linear: non-finite loss at epoch " +
                                 std::to_string(epoch));
        out.per_token_loss.push_back(loss);
    }
    return out;
}

// --- serialization ---

namespace {

nlohmann::ordered_json tokenizer_to_json(const TokenizerConfig& cfg) {
    return nlohmann::ordered_json{{"num_bins", cfg.num_bins},
                                  {"low_center", cfg.low_center},
                                  {"high_center", cfg.high_center},
                                  {"context_length", cfg.context_length},
                                  {"prediction_length", cfg.prediction_length}};
}

TokenizerConfig tokenizer_from_json(const nlohmann::json& j) {
    TokenizerConfig cfg;
    cfg.num_bins = j.at("num_bins").get<int>();
    cfg.low_center = j.at("low_center").get<double>();
    cfg.high_center = j.at("high_center").get<double>();
    cfg.context_length = j.at("context_length").get<int>();
    cfg.prediction_length = j.at("prediction_length").get<int>();
    cfg.validate();
    return cfg;
}

} // namespace

std::string model_to_json(const CountMarkov& model, const TokenizerConfig& tokenizer) {
    nlohmann::ordered_json j;
    j["kind"] = "count_markov";
    j["tokenizer"] = tokenizer_to_json(tokenizer);
    j["order"] = model.order();
    j["smoothing"] = model.smoothing();
    j["vocab_size"] = model.vocab_size();
    nlohmann::ordered_json counts = nlohmann::ordered_json::array();
    for (const auto& [context, entry] : model.table()) {
        nlohmann::ordered_json next = nlohmann::ordered_json::array();
        for (const auto& [token, count] : entry.next) {
            next.push_back({token, count});
        }
        counts.push_back({{"context", context}, {"next", std::move(next)}});
    }
    j["counts"] = std::move(counts);
    return j.dump();
}

std::string model_to_json(const LinearSoftmax& model, const TokenizerConfig& tokenizer) {
    nlohmann::ordered_json j;
    j["kind"] = "linear_softmax";
    j["tokenizer"] = tokenizer_to_json(tokenizer);
    j["window"] = model.window();
    j["vocab_size"] = model.vocab_size();
    j["theta"] = model.theta();
    j["bias"] = model.bias();
    return j.dump();
}

LoadedModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model: invalid JSON: ") + e.what());
    }
    LoadedModel loaded;
    try {
        loaded.kind = j.at("kind").get<std::string>();
        loaded.tokenizer = tokenizer_from_json(j.at("tokenizer"));
        const Vocabulary vocab{.num_bins = loaded.tokenizer.num_bins};
        if (j.at("vocab_size").get<int>() != vocab.size())
            throw DataError("model: vocab_size does not match the tokenizer bins");
        if (loaded.kind == "count_markov") {
            auto model = std::make_unique<CountMarkov>(
                j.at("order").get<int>(), j.at("smoothing").get<double>(),
                j.at("vocab_size").get<int>(), vocab.pad_id);
            for (const auto& entry : j.at("counts")) {
                CountMarkov::Counts counts;
                for (const auto& pair : entry.at("next")) {
                    const TokenId token = pair.at(0).get<TokenId>();
                    const std::uint64_t count = pair.at(1).get<std::uint64_t>();
                    counts.next[token] = count;
                    counts.total += count;
                }
                model->insert_counts(entry.at("context").get<std::vector<TokenId>>(),
                                     std::move(counts));
            }
            loaded.model = std::move(model);
        } else if (loaded.kind == "linear_softmax") {
            auto model = std::make_unique<LinearSoftmax>(
                j.at("window").get<int>(), j.at("vocab_size").get<int>(), vocab.pad_id);
            auto theta = j.at("theta").get<std::vector<double>>();
            auto bias = j.at("bias").get<std::vector<double>>();
            if (theta.size() != model->theta().size() ||
                bias.size() != model->bias().size())
                throw DataError("model: parameter shape mismatch");
            model->theta() = std::move(theta);
            model->bias() = std::move(bias);
            loaded.model = std::move(model);
        } else {
            throw DataError("model: unknown kind '" + loaded.kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model: malformed document: ") + e.what());
    }
    return loaded;
}

} // namespace tokencast
