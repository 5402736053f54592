#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mind::io {

// Signal files: CSV with header `value` and one number per line, JSON
// arrays of numbers, or raw little-endian float64.

std::vector<double> read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::vector<double>& values);

std::vector<double> parse_csv(const std::string& text);
std::string format_csv(const std::vector<double>& values);

std::vector<double> read_json_array(const std::filesystem::path& path);
void write_json_array(const std::filesystem::path& path, const std::vector<double>& values);

std::vector<double> read_binary(const std::filesystem::path& path);
void write_binary(const std::filesystem::path& path, const std::vector<double>& values);

/// Dispatches on extension: .csv, .json, .bin/.f64.
std::vector<double> read_signal(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace mind::io
