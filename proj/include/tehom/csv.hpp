#pragma once

// CSV artifacts: comma separated, '.' decimal point, a header row, LF line
// endings and 12 significant digits. Files are written to a temporary name
// and renamed, and each artifact gets a sidecar manifest
// (<file>.manifest) naming the hash of the configuration that produced it.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tehom/error.hpp"

namespace tehom {

inline std::string csv_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Cells are numbers (formatted to 12 digits) or text.
  struct Cell {
    Cell(double v) : text(csv_number(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(std::size_t v) : text(std::to_string(v)) {}
    Cell(const char* s) : text(s) {}
    Cell(std::string s) : text(std::move(s)) {}
    std::string text;
  };

  void add(std::vector<Cell> row) {
    require(row.size() == header_.size(), ErrorKind::InvalidParameter, "CSV row width differs from header");
    std::vector<std::string> r;
    for (auto& c : row) {
      require(c.text.find_first_of(",\n\"") == std::string::npos, ErrorKind::InvalidParameter,
              "CSV cell contains a separator: " + c.text);
      r.push_back(std::move(c.text));
    }
    rows_.push_back(std::move(r));
  }

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::InvalidParameter, "cannot write " + tmp.string());
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorKind::InvalidParameter, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct Manifest {
  std::string tool;
  std::string version;
  std::string config_hash;
  std::string config_text;  // inputs echoed
  double wall_seconds = 0.0;
  std::map<std::string, std::string> extra;

  std::string str(const std::string& artifact) const {
    std::ostringstream os;
    os << "artifact = " << artifact << "\ntool = " << tool << "\nversion = " << version
       << "\nconfig_hash = " << config_hash << "\nwall_seconds = " << csv_number(wall_seconds) << "\n";
    for (const auto& [k, v] : extra) os << k << " = " << v << "\n";
    os << "\n# configuration\n" << config_text;
    return os.str();
  }
};

/// Writes `table` to dir/name and its manifest next to it.
inline std::filesystem::path write_artifact(const std::filesystem::path& dir, const std::string& name,
                                            const CsvTable& table, const Manifest& manifest) {
  const std::filesystem::path p = dir / name;
  write_atomic(p, table.str());
  write_atomic(p.string() + ".manifest", manifest.str(name));
  return p;
}

}  // namespace tehom
