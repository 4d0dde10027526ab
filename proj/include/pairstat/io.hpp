#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pairstat/errors.hpp"

namespace pairstat::io {

/// 17 significant digits round-trip every double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw ConfigurationError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigurationError("cannot open " + path.string() + " for writing");
  return out;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : path_(path), out_(open_output(path)) {
    write_cells(header);
  }

  void row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line += ',';
      line += format_double(values[i]);
    }
    line += '\n';
    out_ << line;
  }

  void row(const std::vector<std::string>& cells) { write_cells(cells); }

  void close() {
    out_.close();
    if (!out_) throw ConfigurationError("failed writing " + path_.string());
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::filesystem::path path_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ConfigurationError("CSV has no column " + name);
  }

  double number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows.at(row).at(col);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) throw ConfigurationError("CSV cell is not a number: " + cell);
    return v;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (std::getline(in, line)) t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split_csv_line(line));
  }
  return t;
}

/// Binary 8-bit graymap, row-major.
inline void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != width * height) throw ConfigurationError("graymap size mismatch");
  auto out = open_output(path, true);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw ConfigurationError("failed writing " + path.string());
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  auto out = open_output(path);
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  if (!out) throw ConfigurationError("failed writing " + path.string());
}

}  // namespace pairstat::io
