#include "tokencast/series_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tokencast {

namespace {

std::string format_double(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::vector<Obs> target_to_values(const nlohmann::json& target) {
    std::vector<Obs> values;
    values.reserve(target.size());
    for (const auto& v : target) {
        if (v.is_null()) {
            values.emplace_back();
        } else if (v.is_number()) {
            values.emplace_back(v.get<double>());
        } else {
            throw DataError("target entries must be numbers or null");
        }
    }
    return values;
}

// Minimal RFC-style quoting: needed when a field holds , " or newline.
std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::vector<std::string> csv_split(const std::string& line,
                                   const std::filesystem::path& path,
                                   std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (in_quotes)
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": unterminated quote");
    fields.push_back(std::move(field));
    return fields;
}

double parse_double(const std::string& text, const std::filesystem::path& path,
                    std::size_t line_no) {
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": bad number '" + text + "'");
    return value;
}

} // namespace

Dataset load_dataset(const std::filesystem::path& path, int prediction_length,
                     int seasonality, std::string name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file " + path.string());

    Dataset dataset;
    dataset.name = name.empty() ? path.stem().string() : std::move(name);
    dataset.prediction_length = prediction_length;
    dataset.seasonality = seasonality;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
            TimeSeries ts;
            ts.id = record.at("id").get<std::string>();
            ts.frequency = record.at("freq").get<std::string>();
            ts.start = record.at("start").get<std::int64_t>();
            ts.values = target_to_values(record.at("target"));
            dataset.series.push_back(std::move(ts));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed record: " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                            e.what());
        }
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    dataset.validate();
    return dataset;
}

std::vector<std::vector<Obs>> load_series_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file " + path.string());
    std::vector<std::vector<Obs>> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const nlohmann::json record = nlohmann::json::parse(line);
            if (record.is_array()) {
                corpus.push_back(target_to_values(record));
            } else if (record.is_object()) {
                corpus.push_back(target_to_values(record.at("target")));
            } else {
                throw DataError("expected an array or an object with 'target'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed record: " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                            e.what());
        }
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return corpus;
}

void write_series_jsonl(const std::filesystem::path& path,
                        std::span<const std::vector<double>> corpus) {
    std::ostringstream out;
    for (const std::vector<double>& series : corpus) {
        out << '[';
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (i > 0) out << ',';
            out << format_double(series[i]);
        }
        out << "]\n";
    }
    write_file_atomic(path, out.str());
}

void write_forecasts(const std::filesystem::path& path,
                     std::span<const QuantileForecast> forecasts,
                     std::span<const double> levels) {
    std::ostringstream out;
    out << "item_id,step";
    for (const double level : levels) {
        std::ostringstream tag;
        tag << level;
        out << ",q" << tag.str();
    }
    out << ",mean\n";

    for (const QuantileForecast& forecast : forecasts) {
        if (forecast.levels.size() != levels.size())
            throw DataError("forecast '" + forecast.id + "': level set mismatch");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (std::abs(forecast.levels[i] - levels[i]) > 1e-12)
                throw DataError("forecast '" + forecast.id + "': level set mismatch");
        }
        const std::size_t horizon = forecast.mean.size();
        for (std::size_t step = 0; step < horizon; ++step) {
            out << csv_quote(forecast.id) << ',' << (step + 1);
            for (std::size_t li = 0; li < levels.size(); ++li) {
                out << ',' << format_double(forecast.values[li][step]);
            }
            out << ',' << format_double(forecast.mean[step]) << '\n';
        }
    }
    write_file_atomic(path, out.str());
}

std::vector<QuantileForecast> read_forecasts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open forecast file " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw DataError(path.string() + ": empty forecast file (missing header)");
    const std::vector<std::string> header = csv_split(line, path, 1);
    if (header.size() < 3 || header[0] != "item_id" || header[1] != "step" ||
        header.back() != "mean")
        throw DataError(path.string() + ": unexpected header");
    std::vector<double> levels;
    for (std::size_t i = 2; i + 1 < header.size(); ++i) {
        if (header[i].size() < 2 || header[i][0] != 'q')
            throw DataError(path.string() + ": unexpected quantile column '" +
                            header[i] + "'");
        levels.push_back(parse_double(header[i].substr(1), path, 1));
    }

    std::vector<QuantileForecast> forecasts;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = csv_split(line, path, line_no);
        if (fields.size() != header.size())
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
        const std::string& id = fields[0];
        const std::size_t step =
            static_cast<std::size_t>(parse_double(fields[1], path, line_no));
        if (forecasts.empty() || forecasts.back().id != id) {
            QuantileForecast f;
            f.id = id;
            f.levels = levels;
            f.values.assign(levels.size(), {});
            forecasts.push_back(std::move(f));
        }
        QuantileForecast& f = forecasts.back();
        if (step != f.mean.size() + 1)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": steps out of order for series '" + id + "'");
        for (std::size_t li = 0; li < levels.size(); ++li) {
            f.values[li].push_back(parse_double(fields[2 + li], path, line_no));
        }
        f.mean.push_back(parse_double(fields.back(), path, line_no));
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return forecasts;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failure on " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                          ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path.string());
    return buffer.str();
}

} // namespace tokencast
