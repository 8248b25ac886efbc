#pragma once

// Output plumbing for the command-line tools: CSV tables and JSON manifests.
//
// CSV dialect, fixed for bit-stable round-trips: comma separator, '.' decimal
// point, one header row, LF line endings (the stream is opened in binary mode
// so Windows runtimes cannot inject CR), 17 significant digits. A cell whose
// value is unavailable is left empty rather than printed as NaN.

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "geogap/errors.hpp"
#include "json.hpp"

namespace geogap::io {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Cell = std::optional<double>;

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path, std::ios::binary), width_(columns.size()) {
    if (!out_) throw IOError("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != width_)
      throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      if (cells[i]) out_ << format_number(*cells[i]);
    }
    out_ << '\n';
    if (!out_) throw IOError("write failure on csv stream");
  }

  void close() {
    out_.close();
    if (out_.fail()) throw IOError("close failure on csv stream");
  }

 private:
  std::ofstream out_;
  std::size_t width_;
};

// Manifests are deterministic: no timestamps, no host identifiers. Anything
// that influenced the output (resolved configuration with defaults filled in,
// seed, column meanings) belongs in the manifest; nothing else does.
inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IOError("write failure on " + path);
}

inline std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

}  // namespace geogap::io
