#ifndef EOSQ_IO_CSV_HPP
#define EOSQ_IO_CSV_HPP

#include <cstdio>
#include <string>
#include <vector>

#include "../error.hpp"

namespace eosq::io {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw ShapeError("csv row width does not match header");
    rows_.push_back(std::move(cells));
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(num(v));
    row(std::move(cells));
  }

  std::string str() const {
    std::string s = join(header_);
    for (const auto& r : rows_) s += join(r);
    return s;
  }
  std::size_t size() const { return rows_.size(); }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s + "\n";
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace eosq::io

#endif
