#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tokencast/evaluation.hpp"
#include "tokencast/kernelsynth.hpp"
#include "tokencast/models.hpp"
#include "tokencast/tokenizer.hpp"
#include "tokencast/tsmixup.hpp"

namespace tokencast {

/**
 * Flat key=value run configuration with documented defaults. Unknown
 * keys are rejected; every numeric value is validated against its
 * module's invariants up front.
 */
class RunConfig {
public:
    RunConfig(); // defaults only

    /// Parses `key = value` lines; '#' starts a comment.
    void load_file(const std::filesystem::path& path);

    /// Applies one "key=value" override.
    void set(const std::string& assignment);

    /// Validates every module config derivable from the map.
    void validate() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    TokenizerConfig tokenizer() const;
    TSMixupConfig tsmixup() const;
    KernelSynthConfig kernelsynth() const;
    EvalConfig eval() const;
    TrainLinearOptions linear_options(std::uint64_t seed) const;

    int markov_order() const;
    double markov_smoothing() const;
    int num_samples() const;
    double mix_ratio() const;
    int threads() const;

    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace tokencast
