#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tokencast/baselines.hpp"
#include "tokencast/evaluation.hpp"
#include "tokencast/forecaster.hpp"
#include "tokencast/kernelsynth.hpp"
#include "tokencast/models.hpp"
#include "tokencast/parallel.hpp"
#include "tokencast/run_config.hpp"
#include "tokencast/series_io.hpp"
#include "tokencast/tsmixup.hpp"

namespace {

using namespace tokencast;

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitIo = 5;

nlohmann::ordered_json metadata_json(const RunConfig& config, std::uint64_t seed,
                                     const std::map<std::string, std::string>& extra) {
    nlohmann::ordered_json meta;
    meta["seed"] = seed;
    for (const auto& [key, value] : extra) meta[key] = value;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config.entries()) cfg[key] = value;
    meta["config"] = std::move(cfg);
    return meta;
}

// Every artifact gets a sidecar recording the command, seed and full
// configuration of the run that produced it. Contains no paths or
// timestamps, so reruns stay byte-identical.
void write_metadata_sidecar(const std::filesystem::path& artifact,
                            const std::string& command, const RunConfig& config,
                            std::optional<std::uint64_t> seed) {
    nlohmann::ordered_json meta;
    meta["command"] = command;
    meta["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config.entries()) cfg[key] = value;
    meta["config"] = std::move(cfg);
    std::filesystem::path sidecar = artifact;
    sidecar += ".meta.json";
    write_file_atomic(sidecar, meta.dump(2) + "\n");
}

std::vector<Dataset> load_generation_inputs(const std::vector<std::string>& paths) {
    if (paths.empty())
        throw ConfigError("generate: at least one --data dataset is required");
    std::vector<Dataset> datasets;
    datasets.reserve(paths.size());
    for (const std::string& p : paths) datasets.push_back(load_dataset(p, 1, 1));
    return datasets;
}

int cmd_generate(const RunConfig& config, const std::string& kind, int count,
                 std::uint64_t seed, const std::string& out,
                 const std::vector<std::string>& data_paths, bool emit_kernel) {
    if (count < 0) throw ConfigError("generate: --n must be >= 0");
    if (emit_kernel && kind != "kernelsynth")
        throw ConfigError("generate: --emit-kernel requires --kind kernelsynth");

    if (kind == "kernelsynth" && emit_kernel) {
        const std::vector<SynthSeries> corpus = generate_kernelsynth_corpus(
            config.kernelsynth(), count, seed, config.threads());
        std::ostringstream lines;
        for (const SynthSeries& s : corpus) {
            nlohmann::ordered_json record;
            record["kernel"] = s.spec.to_string();
            record["target"] = s.values;
            lines << record.dump() << "\n";
        }
        write_file_atomic(out, lines.str());
        write_metadata_sidecar(out, "generate", config, seed);
        std::cout << "wrote " << count << " kernelsynth series to " << out << "\n";
        return 0;
    }

    std::vector<std::vector<double>> corpus;
    if (kind == "tsmixup") {
        const std::vector<Dataset> datasets = load_generation_inputs(data_paths);
        corpus = generate_tsmixup_corpus(datasets, config.tsmixup(), count, seed,
                                         config.threads());
    } else if (kind == "kernelsynth") {
        const KernelSynthConfig kcfg = config.kernelsynth();
        corpus.resize(static_cast<std::size_t>(count));
        parallel_for(corpus.size(), config.threads(), [&](std::size_t i) {
            Rng rng = Rng::derive(seed, i);
            corpus[i] = kernelsynth_generate(default_kernel_bank(), kcfg, rng).values;
        });
    } else if (kind == "mixed") {
        const std::vector<Dataset> datasets = load_generation_inputs(data_paths);
        const TSMixupConfig mix_cfg = config.tsmixup();
        const KernelSynthConfig synth_cfg = config.kernelsynth();
        const double ratio = config.mix_ratio();
        corpus.resize(static_cast<std::size_t>(count));
        parallel_for(corpus.size(), config.threads(), [&](std::size_t i) {
            Rng rng = Rng::derive(seed, i);
            if (rng.uniform01() < ratio) {
                corpus[i] = tsmixup_sample(datasets, mix_cfg, rng);
            } else {
                corpus[i] = kernelsynth_generate(default_kernel_bank(), synth_cfg, rng)
                                .values;
            }
        });
    } else {
        throw ConfigError("generate: unknown kind '" + kind +
                          "' (expected tsmixup, kernelsynth or mixed)");
    }
    write_series_jsonl(out, corpus);
    write_metadata_sidecar(out, "generate", config, seed);
    std::cout << "wrote " << count << " " << kind << " series to " << out << "\n";
    return 0;
}

int cmd_tokenize(const RunConfig& config, const std::string& data,
                 const std::string& out) {
    const Tokenizer tokenizer(config.tokenizer());
    const std::vector<std::vector<Obs>> corpus = load_series_values(data);
    std::ostringstream lines;
    std::size_t index = 0;
    for (const std::vector<Obs>& values : corpus) {
        ++index;
        if (values.empty())
            throw DataError(data + ": record " + std::to_string(index) +
                            " has an empty target");
        const TokenSeq seq = tokenizer.tokenize_window(values);
        nlohmann::ordered_json record;
        record["tokens"] = seq.tokens;
        record["scale"] = seq.scale;
        lines << record.dump() << "\n";
    }
    write_file_atomic(out, lines.str());
    write_metadata_sidecar(out, "tokenize", config, std::nullopt);
    std::cout << "tokenized " << corpus.size() << " series to " << out << "\n";
    return 0;
}

int cmd_train(const RunConfig& config, const std::string& model_kind,
              const std::string& data, std::uint64_t seed, const std::string& out) {
    const Tokenizer tokenizer(config.tokenizer());
    const std::vector<std::vector<Obs>> corpus = load_series_values(data);
    if (corpus.empty()) throw DataError("train: corpus " + data + " is empty");

    std::string document;
    if (model_kind == "markov") {
        std::vector<std::vector<TokenId>> sequences;
        sequences.reserve(corpus.size());
        for (const std::vector<Obs>& values : corpus) {
            if (values.empty()) continue;
            sequences.push_back(tokenizer.tokenize_window(values).tokens);
        }
        const CountMarkov model =
            fit_markov(sequences, config.markov_order(), config.markov_smoothing(),
                       tokenizer.vocab());
        document = model_to_json(model, tokenizer.config());
        std::cout << "fit markov(order=" << model.order() << ") on "
                  << sequences.size() << " series, " << model.table().size()
                  << " contexts\n";
    } else if (model_kind == "linear") {
        const std::vector<TrainingExample> examples = build_training_examples(
            corpus, tokenizer.config().prediction_length, tokenizer);
        if (examples.empty())
            throw DataError("train: no series long enough for prediction_length " +
                            std::to_string(tokenizer.config().prediction_length));
        const TrainedLinear trained =
            train_linear(examples, tokenizer.vocab(), config.linear_options(seed));
        document = model_to_json(trained.model, tokenizer.config());
        std::cout << "trained linear_softmax on " << examples.size() << " examples";
        if (!trained.per_token_loss.empty()) {
            std::cout << "; per-token loss " << trained.per_token_loss.front()
                      << " -> " << trained.per_token_loss.back();
        }
        std::cout << "\n";
    } else {
        throw ConfigError("train: unknown model '" + model_kind +
                          "' (expected markov or linear)");
    }
    write_file_atomic(out, document);
    write_metadata_sidecar(out, "train", config, seed);
    return 0;
}

int cmd_forecast(const RunConfig& config, const std::string& model_path,
                 const std::string& data, const std::string& out, std::uint64_t seed,
                 int horizon, int seasonality, bool full_series) {
    const LoadedModel loaded = model_from_json(read_file(model_path));
    const Tokenizer tokenizer(loaded.tokenizer);
    if (horizon < 1) throw ConfigError("forecast: --horizon must be >= 1");

    // Full-series mode forecasts past the end, so the series only needs a
    // nonempty context; the split mode holds out the last H observations.
    const Dataset dataset = load_dataset(data, full_series ? 1 : horizon,
                                         seasonality > 0 ? seasonality : 1);
    std::vector<TimeSeries> contexts;
    if (full_series) {
        contexts = dataset.series;
    } else {
        for (SplitSeries& task : split_context_target(dataset)) {
            contexts.push_back(std::move(task.context));
        }
    }

    const std::vector<double> levels = config.eval().levels;
    const int num_samples = config.num_samples();
    std::vector<QuantileForecast> forecasts(contexts.size());
    parallel_for(contexts.size(), config.threads(), [&](std::size_t i) {
        const ForecastSamples samples =
            forecast(*loaded.model, contexts[i], horizon, num_samples, tokenizer,
                     mix_seed(seed, i));
        forecasts[i] = samples_to_quantiles(samples, levels);
    });
    write_forecasts(out, forecasts, levels);
    write_metadata_sidecar(out, "forecast", config, seed);
    std::cout << "forecast " << contexts.size() << " series x " << horizon
              << " steps (" << num_samples << " paths) to " << out << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& config, const std::string& data,
                 const std::vector<std::string>& forecast_specs,
                 const std::string& out, std::uint64_t seed, int horizon,
                 int seasonality) {
    if (horizon < 1) throw ConfigError("evaluate: --horizon must be >= 1");
    const EvalConfig eval_cfg = config.eval();

    Dataset dataset = load_dataset(data, horizon, 1);
    dataset.seasonality = seasonality > 0
                              ? seasonality
                              : season_length(dataset.series.empty()
                                                  ? std::string()
                                                  : dataset.series.front().frequency);
    dataset.validate();
    const std::vector<SplitSeries> tasks = split_context_target(dataset);

    // Point baselines are computed here so the relative-score denominator
    // is always available.
    std::map<std::string, std::vector<QuantileForecast>> by_model;
    std::vector<QuantileForecast>& snaive = by_model["seasonal_naive"];
    std::vector<QuantileForecast>& plain = by_model["naive"];
    for (const SplitSeries& task : tasks) {
        const PointForecast point =
            seasonal_naive(task.context.values, horizon, dataset.seasonality);
        snaive.push_back(
            as_quantile_forecast(point.values, eval_cfg.levels, task.context.id));
        plain.push_back(as_quantile_forecast(naive(task.context.values, horizon),
                                             eval_cfg.levels, task.context.id));
    }

    for (const std::string& spec : forecast_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("evaluate: --forecast expects name=path, got '" + spec +
                              "'");
        const std::string name = spec.substr(0, eq);
        const std::string path = spec.substr(eq + 1);
        if (by_model.count(name))
            throw ConfigError("evaluate: duplicate model name '" + name + "'");

        std::map<std::string, QuantileForecast> by_id;
        for (QuantileForecast& f : read_forecasts(path)) {
            by_id[f.id] = std::move(f);
        }
        std::vector<QuantileForecast> aligned;
        aligned.reserve(tasks.size());
        for (const SplitSeries& task : tasks) {
            const auto it = by_id.find(task.context.id);
            if (it == by_id.end())
                throw DataError("evaluate: " + path + " has no forecast for series '" +
                                task.context.id + "'");
            if (it->second.mean.size() != static_cast<std::size_t>(horizon))
                throw DataError("evaluate: " + path + " horizon mismatch for '" +
                                task.context.id + "'");
            aligned.push_back(std::move(it->second));
        }
        by_model[name] = std::move(aligned);
    }

    std::vector<std::vector<Obs>> actuals;
    actuals.reserve(tasks.size());
    for (const SplitSeries& task : tasks) actuals.push_back(task.target);

    ScoreMap scores;
    for (const auto& [name, forecasts] : by_model) {
        ScoreEntry entry;
        entry.wql = wql(forecasts, actuals, eval_cfg.levels);
        if (const auto m = dataset_mase(forecasts, tasks, dataset.seasonality)) {
            entry.mase = m->value;
            entry.mase_used = m->used;
            entry.mase_skipped = m->skipped;
        } else {
            entry.mase_skipped = tasks.size();
        }
        scores[dataset.name][name] = entry;
    }

    const EvalReport report = build_report(scores, eval_cfg);
    const std::string document = report_to_json(
        report,
        metadata_json(config, seed,
                      {{"dataset", dataset.name},
                       {"horizon", std::to_string(horizon)},
                       {"seasonality", std::to_string(dataset.seasonality)}})
            .dump());
    write_file_atomic(out, document);

    std::cout << "evaluated " << by_model.size() << " models on " << dataset.name
              << " (" << tasks.size() << " series, H=" << horizon
              << ", S=" << dataset.seasonality << ")\n";
    for (const auto& [model, agg] : report.aggregates) {
        std::cout << "  " << model << ": rel_wql=" << agg.agg_relative_wql
                  << " rel_mase=" << agg.agg_relative_mase << "\n";
    }
    return 0;
}

int cmd_report(const std::string& in, const std::string& out_table,
               const std::string& out_csv) {
    const std::string document = read_file(in);
    try {
        const std::string table = render_report_table(document);
        if (out_table.empty()) {
            std::cout << table;
        } else {
            write_file_atomic(out_table, table);
        }
        if (!out_csv.empty()) {
            write_file_atomic(out_csv, report_to_plot_csv(document));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(in + ": not a valid report document: " + e.what());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tokenized probabilistic time-series forecasting pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    int threads_flag = 0;
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--set", overrides, "override one configuration key (key=value)");
    app.add_option("--threads", threads_flag,
                   "worker cap (outputs are identical for any value)");

    std::uint64_t seed = 0;
    int count = 0;
    int horizon = 0;
    int seasonality = 0;
    std::string kind;
    std::string model_kind;
    std::string model_path;
    std::string data;
    std::string out;
    std::string in;
    std::string out_table;
    std::string out_csv;
    std::vector<std::string> data_paths;
    std::vector<std::string> forecast_specs;
    bool emit_kernel = false;
    bool full_series = false;

    CLI::App* generate = app.add_subcommand("generate", "generate a training corpus");
    generate->add_option("--kind", kind, "tsmixup | kernelsynth | mixed")->required();
    generate->add_option("--n", count, "number of series")->required();
    generate->add_option("--seed", seed, "rng seed")->required();
    generate->add_option("--out", out, "output JSONL path")->required();
    generate->add_option("--data", data_paths, "input dataset JSONL (repeatable)");
    generate->add_flag("--emit-kernel", emit_kernel,
                       "kernelsynth only: include the kernel expression per record");

    CLI::App* tokenize = app.add_subcommand("tokenize", "tokenize a corpus");
    tokenize->add_option("--data", data, "corpus JSONL")->required();
    tokenize->add_option("--out", out, "output JSONL path")->required();

    CLI::App* train = app.add_subcommand("train", "fit a next-token model");
    train->add_option("--model", model_kind, "markov | linear")->required();
    train->add_option("--data", data, "training corpus JSONL")->required();
    train->add_option("--seed", seed, "rng seed")->required();
    train->add_option("--out", out, "model JSON path")->required();

    CLI::App* fc = app.add_subcommand("forecast", "sample forecasts from a model");
    fc->add_option("--model", model_path, "model JSON path")->required();
    fc->add_option("--data", data, "dataset JSONL")->required();
    fc->add_option("--horizon", horizon, "prediction length H")->required();
    fc->add_option("--seed", seed, "rng seed")->required();
    fc->add_option("--out", out, "forecast CSV path")->required();
    fc->add_option("--seasonality", seasonality, "season length (metadata only)");
    fc->add_flag("--full-series", full_series,
                 "forecast past the end of each series instead of the held-out tail");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score forecasts");
    evaluate->add_option("--data", data, "dataset JSONL")->required();
    evaluate->add_option("--horizon", horizon, "prediction length H")->required();
    evaluate->add_option("--forecast", forecast_specs,
                         "model forecast as name=path.csv (repeatable)");
    evaluate->add_option("--out", out, "report JSON path")->required();
    evaluate->add_option("--seasonality", seasonality,
                         "season length (default: from the frequency tag)");
    evaluate->add_option("--seed", seed, "seed recorded in the report metadata");

    CLI::App* report = app.add_subcommand("report", "render a report JSON");
    report->add_option("--in", in, "report JSON path")->required();
    report->add_option("--out-table", out_table, "write the text table here");
    report->add_option("--out-csv", out_csv, "write the plot CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) config.load_file(config_path);
        for (const std::string& assignment : overrides) config.set(assignment);
        if (threads_flag != 0) config.set("threads=" + std::to_string(threads_flag));
        config.validate();

        if (generate->parsed())
            return cmd_generate(config, kind, count, seed, out, data_paths, emit_kernel);
        if (tokenize->parsed()) return cmd_tokenize(config, data, out);
        if (train->parsed()) return cmd_train(config, model_kind, data, seed, out);
        if (fc->parsed())
            return cmd_forecast(config, model_path, data, out, seed, horizon,
                                seasonality, full_series);
        if (evaluate->parsed())
            return cmd_evaluate(config, data, forecast_specs, out, seed, horizon,
                                seasonality);
        if (report->parsed()) return cmd_report(in, out_table, out_csv);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
