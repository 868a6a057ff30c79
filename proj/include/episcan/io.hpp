#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "episcan/ar1.hpp"
#include "episcan/inference.hpp"
#include "episcan/innovations.hpp"
#include "episcan/limits.hpp"
#include "episcan/scan.hpp"

namespace episcan {

using Json = nlohmann::json;

/// Shortest decimal representation that round-trips, '.' separator.
std::string format_double(double v);

/// Strict parse of a whole field; throws DataError.
double parse_double(std::string_view field);

/// First line of every CSV the CLI writes: "# episcan <command> generated_at=<UTC>".
/// Readers skip lines starting with '#'.
std::string csv_banner(const std::string& command);

// JSON mappings. from_json_* throw ConfigError on malformed input.
Json to_json(const InnovationSpec& spec);
InnovationSpec innovation_from_json(const Json& j);
Json to_json(const ModelSpec& model);
ModelSpec model_from_json(const Json& j);
Json to_json(const EpidemicSpec& e);
EpidemicSpec epidemic_from_json(const Json& j);
Json to_json(const ScanResult& r);
Json to_json(const TestReport& r);

/// One CSV row (no newline) and its header, for batch runs.
std::string test_report_csv_header();
std::string test_report_csv_row(const TestReport& r);

// Critical-value table files.
Json to_json(const CalibrationEntry& e, bool include_sample = true);
/// Throws DataError on version or digest mismatch.
CalibrationEntry calibration_from_json(const Json& j);
void save_calibration(const CalibrationEntry& e, const std::filesystem::path& path);
CalibrationEntry load_calibration(const std::filesystem::path& path);
std::filesystem::path calibration_cache_path(const std::filesystem::path& dir, const CalibrationKey& key);

/// Entry for `key` from `cache_dir` if a file with identical parameters
/// exists, otherwise computed and (when cache_dir is non-empty) written.
CalibrationEntry load_or_calibrate(const CalibrationKey& key, const std::filesystem::path& cache_dir);

/// Sorted sample as CSV: "rank,value".
void write_sample_csv(std::ostream& os, const CalibrationEntry& e);

// Series files: columns index,y,eps,tau,z; row 0 has empty eps.
void write_series_csv(std::ostream& os, const SeriesBundle& b, const std::string& banner);

struct SeriesFile {
    std::vector<double> y;                   ///< y_0..y_n
    std::optional<std::vector<double>> eps;  ///< e_1..e_n when present
    std::optional<std::vector<double>> tau;
    std::optional<std::vector<double>> z;
};

/// Needs at least an `index` and a `y` column; throws DataError otherwise.
SeriesFile read_series_csv(std::istream& is);
SeriesFile read_series_csv(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

}  // namespace episcan
