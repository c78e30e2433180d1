#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankdiff::csv {

// Round-trippable text for doubles, C locale, '.' decimal separator.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(long long v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%lld", v);
  return buf;
}

inline std::string fmt(std::size_t v) {
  return fmt(static_cast<long long>(v));
}

class Writer {
 public:
  Writer(const std::string& path, std::initializer_list<std::string> header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    bool first = true;
    for (const auto& h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

// Minimal reader for the files this library writes: header line then
// comma-separated numeric rows.
std::vector<std::vector<double>> read_numeric(const std::string& path,
                                              std::size_t expect_cols);

} // namespace rankdiff::csv
