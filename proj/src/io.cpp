#include "mind/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mind/error.hpp"

namespace mind::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

} // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

std::vector<double> parse_csv(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty())
      continue;
    if (!header_seen) {
      header_seen = true;
      if (t == "value")
        continue;
      throw IoError("malformed CSV: expected header 'value' on line 1, got '" + std::string(t) + "'");
    }
    // the whole field must parse
    const std::string field(t);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
      throw IoError("malformed CSV: line " + std::to_string(lineno) + " is not a number: '" + field + "'");
    values.push_back(v);
  }
  if (!header_seen)
    throw IoError("malformed CSV: empty input");
  return values;
}

std::string format_csv(const std::vector<double>& values) {
  std::string out = "value\n";
  char buf[64];
  for (double v : values) {
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
    out.push_back('\n');
  }
  return out;
}

std::vector<double> read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

void write_csv(const std::filesystem::path& path, const std::vector<double>& values) {
  write_text(path, format_csv(values));
}

std::vector<double> read_json_array(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_text(path));
    if (!j.is_array())
      throw IoError("JSON signal file must contain an array");
    return j.get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void write_json_array(const std::filesystem::path& path, const std::vector<double>& values) {
  write_text(path, nlohmann::json(values).dump() + "\n");
}

std::vector<double> read_binary(const std::filesystem::path& path) {
  const std::string raw = read_text(path);
  if (raw.size() % 8 != 0)
    throw IoError("binary signal size is not a multiple of 8 bytes");
  std::vector<double> values(raw.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b)
      bits = (bits << 8) | static_cast<unsigned char>(raw[i * 8 + static_cast<std::size_t>(b)]);
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

void write_binary(const std::filesystem::path& path, const std::vector<double>& values) {
  std::string raw(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) {
      raw[i * 8 + static_cast<std::size_t>(b)] = static_cast<char>(bits & 0xffu);
      bits >>= 8;
    }
  }
  write_text(path, raw);
}

std::vector<double> read_signal(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json")
    return read_json_array(path);
  if (ext == ".bin" || ext == ".f64")
    return read_binary(path);
  return read_csv(path);
}

} // namespace mind::io
