#pragma once

// Column-oriented run trace with a lossless CSV form.
//
// Doubles are written in shortest round-trip form, so a trace read back
// from disk is bit-identical to the one that produced it.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trussforge/common.hpp"

namespace trussforge {

class Trace {
 public:
  Trace() = default;
  explicit Trace(std::vector<std::string> columns) : columns_(std::move(columns)) { reindex(); }

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return columns_.empty() ? 0 : data_.size() / columns_.size(); }
  bool has(std::string_view name) const { return lookup_.count(std::string(name)) != 0; }

  std::size_t column(std::string_view name) const {
    auto it = lookup_.find(std::string(name));
    if (it == lookup_.end()) throw ConfigError("trace has no column '" + std::string(name) + "'");
    return it->second;
  }

  double at(std::size_t row, std::size_t col) const { return data_[row * columns_.size() + col]; }
  double at(std::size_t row, std::string_view name) const { return at(row, column(name)); }

  std::vector<double> series(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, c);
    return out;
  }

  void append(const std::vector<double>& row) {
    if (row.size() != columns_.size()) throw DimensionMismatch("trace row width mismatch");
    data_.insert(data_.end(), row.begin(), row.end());
  }

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.columns_ == b.columns_ && a.data_ == b.data_;
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
    os << '\n';
    char buf[64];
    const std::size_t w = columns_.size();
    for (std::size_t r = 0; r < rows(); ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        if (c) os << ',';
        auto res = std::to_chars(buf, buf + sizeof buf, data_[r * w + c]);
        os.write(buf, res.ptr - buf);
      }
      os << '\n';
    }
  }

  void write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    write_csv(f);
  }

  static Trace read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty trace file");
    std::vector<std::string> cols;
    {
      std::stringstream ss(line);
      std::string name;
      while (std::getline(ss, name, ',')) cols.push_back(name);
    }
    Trace t(cols);
    std::vector<double> row(cols.size());
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      const char* p = line.data();
      const char* end = p + line.size();
      for (std::size_t c = 0; c < cols.size(); ++c) {
        auto res = std::from_chars(p, end, row[c]);
        if (res.ec != std::errc()) {
          throw ConfigError("trace line " + std::to_string(lineno) + ": bad number in column " +
                            cols[c]);
        }
        p = res.ptr;
        if (c + 1 < cols.size()) {
          if (p == end || *p != ',') {
            throw ConfigError("trace line " + std::to_string(lineno) + " is short");
          }
          ++p;
        }
      }
      t.append(row);
    }
    return t;
  }

  static Trace read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    return read_csv(f);
  }

 private:
  void reindex() {
    lookup_.clear();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (!lookup_.emplace(columns_[i], i).second) {
        throw ConfigError("duplicate trace column '" + columns_[i] + "'");
      }
    }
  }

  std::vector<std::string> columns_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::vector<double> data_;
};

}  // namespace trussforge
