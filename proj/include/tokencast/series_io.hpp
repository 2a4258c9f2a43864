#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tokencast/forecaster.hpp"
#include "tokencast/series.hpp"

namespace tokencast {

/**
 * Loads a JSON Lines dataset: one object per line with fields
 * {id, freq, start, target}; null entries in target mark missing
 * observations. Series keep their file order. Malformed lines raise a
 * DataError naming the line number; series not longer than
 * prediction_length raise a DataError naming the id.
 */
Dataset load_dataset(const std::filesystem::path& path, int prediction_length,
                     int seasonality, std::string name = "");

/// Reads a corpus of raw value arrays; accepts either a bare JSON array
/// per line or an object with a "target" field.
std::vector<std::vector<Obs>> load_series_values(const std::filesystem::path& path);

/// Writes one JSON array per line. Numbers round-trip exactly.
void write_series_jsonl(const std::filesystem::path& path,
                        std::span<const std::vector<double>> corpus);

/**
 * CSV with header item_id,step,q<level>...,mean; one row per
 * (series, step) in input order, steps 1-based. Values are printed with
 * 17 significant digits, so re-reading reproduces them bit-exactly.
 * Every forecast must carry exactly the given levels.
 */
void write_forecasts(const std::filesystem::path& path,
                     std::span<const QuantileForecast> forecasts,
                     std::span<const double> levels);

/// Reads the CSV format produced by write_forecasts.
std::vector<QuantileForecast> read_forecasts(const std::filesystem::path& path);

/// Writes via a temp file + rename, so interrupted runs never leave a
/// truncated artifact behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

} // namespace tokencast
