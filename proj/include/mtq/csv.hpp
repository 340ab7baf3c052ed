#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace mtq {

// Key/value pairs written as "# key: value" lines above the CSV body.
struct Manifest {
  std::vector<std::pair<std::string, std::string>> fields;
  Manifest& add(std::string key, std::string value);
};

// Shortest round-trip representation, so reruns are byte-identical.
std::string fmt(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const Manifest& m, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t width_;
};

std::string csv_escape(const std::string& cell);

}  // namespace mtq
