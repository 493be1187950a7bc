#pragma once

// Report writers. JSON objects keep their keys sorted (nlohmann::json's default map), so the
// same inputs always produce the same bytes; timestamps live only in metadata.json.

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "radialscope/errors.hpp"

namespace radialscope {

using Json = nlohmann::json;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

/// Hash of the verbatim config text and the effective seed, as 16 hex digits.
inline std::string config_hash(const std::string& text, std::uint64_t seed) {
  const std::uint64_t h = fnv1a64("\nseed=" + std::to_string(seed), fnv1a64(text));
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

inline Json complex_json(std::complex<double> c) { return Json::array({c.real(), c.imag()}); }

inline std::string complex_label(std::complex<double> c) {
  std::ostringstream out;
  out << std::setprecision(6) << c.real() << (c.imag() < 0 ? "-" : "+") << std::fabs(c.imag()) << "i";
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

/// Whitespace-delimited columns with a commented header line.
class ColumnWriter {
 public:
  explicit ColumnWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::ostringstream line;
    line << std::setprecision(17);
    bool first = true;
    ((line << (first ? "" : " ") << cells, first = false), ...);
    rows_.push_back(line.str());
  }

  void row_values(const std::vector<double>& cells, const std::string& prefix = {}) {
    std::ostringstream line;
    line << std::setprecision(17) << prefix;
    for (std::size_t i = 0; i < cells.size(); ++i) line << (i || !prefix.empty() ? " " : "") << cells[i];
    rows_.push_back(line.str());
  }

  std::string str() const {
    std::string out = "#";
    for (const auto& h : header_) out += " " + h;
    out += "\n";
    for (const auto& r : rows_) out += r + "\n";
    return out;
  }

  void write(const std::filesystem::path& path) const { write_text(path, str()); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

}  // namespace radialscope
