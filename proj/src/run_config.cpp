#include "tokencast/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace tokencast {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

RunConfig::RunConfig() {
    values_ = {
        {"tokenizer.num_bins", "4094"},
        {"tokenizer.low_center", "-15"},
        {"tokenizer.high_center", "15"},
        {"tokenizer.context_length", "512"},
        {"tokenizer.prediction_length", "64"},
        {"tsmixup.max_mix", "3"},
        {"tsmixup.alpha", "1.5"},
        {"tsmixup.min_length", "128"},
        {"tsmixup.max_length", "2048"},
        {"kernelsynth.max_kernels", "5"},
        {"kernelsynth.length", "1024"},
        {"kernelsynth.jitter", "1e-6"},
        {"markov.order", "1"},
        {"markov.smoothing", "1"},
        {"linear.window", "8"},
        {"linear.epochs", "50"},
        {"linear.learning_rate", "0.1"},
        {"linear.batch_size", "0"},
        {"forecast.num_samples", "20"},
        {"eval.levels", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"},
        {"eval.baseline", "seasonal_naive"},
        {"mix.ratio", "0.9"},
        {"threads", "1"},
    };
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        try {
            set(trimmed);
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " +
                              e.what());
        }
    }
}

void RunConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("expected key=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    if (value.empty()) throw ConfigError("empty value for config key '" + key + "'");
    it->second = value;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string& text = values_.at(key);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("config key '" + key + "': bad number '" + text + "'");
    return value;
}

int RunConfig::get_int(const std::string& key) const {
    const std::string& text = values_.at(key);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("config key '" + key + "': bad integer '" + text + "'");
    return value;
}

std::string RunConfig::get_string(const std::string& key) const {
    return values_.at(key);
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
    const std::string& text = values_.at(key);
    std::vector<double> out;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find(',', begin);
        if (end == std::string::npos) end = text.size();
        const std::string item = trim(text.substr(begin, end - begin));
        if (item.empty())
            throw ConfigError("config key '" + key + "': empty list item");
        double value = 0.0;
        const auto [ptr, ec] =
            std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc() || ptr != item.data() + item.size())
            throw ConfigError("config key '" + key + "': bad number '" + item + "'");
        out.push_back(value);
        begin = end + 1;
    }
    return out;
}

TokenizerConfig RunConfig::tokenizer() const {
    TokenizerConfig cfg;
    cfg.num_bins = get_int("tokenizer.num_bins");
    cfg.low_center = get_double("tokenizer.low_center");
    cfg.high_center = get_double("tokenizer.high_center");
    cfg.context_length = get_int("tokenizer.context_length");
    cfg.prediction_length = get_int("tokenizer.prediction_length");
    cfg.validate();
    return cfg;
}

TSMixupConfig RunConfig::tsmixup() const {
    TSMixupConfig cfg;
    cfg.max_mix = get_int("tsmixup.max_mix");
    cfg.alpha = get_double("tsmixup.alpha");
    cfg.min_length = get_int("tsmixup.min_length");
    cfg.max_length = get_int("tsmixup.max_length");
    cfg.validate();
    return cfg;
}

KernelSynthConfig RunConfig::kernelsynth() const {
    KernelSynthConfig cfg;
    cfg.max_kernels = get_int("kernelsynth.max_kernels");
    cfg.length = get_int("kernelsynth.length");
    cfg.jitter = get_double("kernelsynth.jitter");
    cfg.validate();
    return cfg;
}

EvalConfig RunConfig::eval() const {
    EvalConfig cfg;
    cfg.levels = get_double_list("eval.levels");
    cfg.baseline = get_string("eval.baseline");
    cfg.validate();
    return cfg;
}

TrainLinearOptions RunConfig::linear_options(std::uint64_t seed) const {
    TrainLinearOptions options;
    options.window = get_int("linear.window");
    options.epochs = get_int("linear.epochs");
    options.learning_rate = get_double("linear.learning_rate");
    options.batch_size = get_int("linear.batch_size");
    options.seed = seed;
    if (options.window < 1) throw ConfigError("linear.window must be >= 1");
    if (options.epochs < 0) throw ConfigError("linear.epochs must be >= 0");
    if (options.learning_rate < 0.0)
        throw ConfigError("linear.learning_rate must be >= 0");
    if (options.batch_size < 0) throw ConfigError("linear.batch_size must be >= 0");
    return options;
}

int RunConfig::markov_order() const {
    const int order = get_int("markov.order");
    if (order < 1) throw ConfigError("markov.order must be >= 1");
    return order;
}

double RunConfig::markov_smoothing() const {
    const double eps = get_double("markov.smoothing");
    if (!(eps > 0.0)) throw ConfigError("markov.smoothing must be > 0");
    return eps;
}

int RunConfig::num_samples() const {
    const int n = get_int("forecast.num_samples");
    if (n < 1) throw ConfigError("forecast.num_samples must be >= 1");
    return n;
}

double RunConfig::mix_ratio() const {
    const double r = get_double("mix.ratio");
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("mix.ratio must lie in [0, 1]");
    return r;
}

int RunConfig::threads() const {
    const int n = get_int("threads");
    if (n < 1) throw ConfigError("threads must be >= 1");
    return n;
}

void RunConfig::validate() const {
    tokenizer();
    tsmixup();
    kernelsynth();
    eval();
    linear_options(0);
    markov_order();
    markov_smoothing();
    num_samples();
    mix_ratio();
    threads();
}

} // namespace tokencast
