#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nonlocal/errors.hpp"

namespace nonlocal {

// Serialization helpers shared by the command-line front end. Everything here
// is deterministic: a fixed shortest-round-trip float format, the C-locale
// decimal point, LF line endings, and no timestamps, so re-running a command
// with the same inputs reproduces every artifact byte for byte.

// Round-trip decimal form of a double: 17 significant digits always recover
// the exact bit pattern; snprintf with an unset locale keeps '.' as the
// decimal separator.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_long(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", v);
  return buf;
}

// Minimal RFC-style quoting: only fields containing a comma, quote, or
// newline are wrapped (none of the built-in column values need it, but user
// supplied names pass through here too).
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Writes `content` to `path` atomically: the bytes land in a sibling
// temporary first and are renamed into place, so readers never observe a
// partial file and a crashed run never leaves a truncated artifact.
inline void atomic_write_text(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw config_error("cannot open for writing: " + tmp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw config_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw config_error("rename failed: " + tmp.string() + " -> " +
                       path.string() + " (" + ec.message() + ")");
}

// One CSV table: a header row plus data rows, comma separated, LF endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header)
      : header_(std::move(header)) {}

  // Row builder: push cells of mixed type, then commit the row.
  CsvTable& cell(const std::string& v) {
    pending_.push_back(csv_escape(v));
    return *this;
  }
  CsvTable& cell(const char* v) { return cell(std::string(v)); }
  CsvTable& cell(double v) {
    pending_.push_back(format_double(v));
    return *this;
  }
  CsvTable& cell(long long v) {
    pending_.push_back(format_long(v));
    return *this;
  }
  CsvTable& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvTable& cell(bool v) {
    pending_.push_back(v ? "true" : "false");
    return *this;
  }

  void end_row() {
    if (pending_.size() != header_.size())
      throw config_error("csv row width does not match header");
    rows_.push_back(pending_);
    pending_.clear();
  }

  std::string to_string() const {
    std::string out = join(header_);
    for (const auto& r : rows_) out += join(r);
    return out;
  }

  void write(const std::filesystem::path& path) const {
    atomic_write_text(path, to_string());
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    line += '\n';
    return line;
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> pending_;
};

// Run manifest: ordered `key = value` lines, plain text. Deliberately free of
// wall-clock data so that identical runs produce identical manifests.
class Manifest {
 public:
  void add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
  }
  // Keeps string literals from decaying to the bool overload.
  void add(const std::string& key, const char* value) {
    entries_.emplace_back(key, std::string(value));
  }
  void add(const std::string& key, double value) {
    entries_.emplace_back(key, format_double(value));
  }
  void add(const std::string& key, long long value) {
    entries_.emplace_back(key, format_long(value));
  }
  void add(const std::string& key, int value) {
    add(key, static_cast<long long>(value));
  }
  void add(const std::string& key, bool value) {
    entries_.emplace_back(key, value ? "true" : "false");
  }

  std::string to_string() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
      out += k;
      out += " = ";
      out += v;
      out += '\n';
    }
    return out;
  }

  void write(const std::filesystem::path& path) const {
    atomic_write_text(path, to_string());
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// FNV-1a over the raw bytes; used to stamp each manifest with a fingerprint
// of the exact configuration text that produced the run.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nonlocal
