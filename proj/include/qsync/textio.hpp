#pragma once

// Delimited-text helpers shared by the dataset, model and scan writers.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qsync::textio {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

std::vector<std::string_view> split_commas(std::string_view line);

/// Strict parse of the whole field; throws FormatError otherwise.
double parse_double(std::string_view field);
long long parse_integer(std::string_view field);

/// `foo/bar.csv` -> `foo/bar.manifest.json`.
std::filesystem::path manifest_path(const std::filesystem::path& data_path);

/// Throws std::runtime_error when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace qsync::textio
