#include "mtq/csv.hpp"

#include "mtq/core.hpp"

#include <charconv>
#include <cmath>

namespace mtq {

Manifest& Manifest::add(std::string key, std::string value) {
  fields.emplace_back(std::move(key), std::move(value));
  return *this;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

CsvWriter::CsvWriter(std::ostream& os, const Manifest& m, const std::vector<std::string>& columns)
    : os_(os), width_(columns.size()) {
  for (const auto& [k, v] : m.fields) os_ << "# " << k << ": " << v << '\n';
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw InputError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                                               std::to_string(width_));
  for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << csv_escape(cells[i]);
  os_ << '\n';
}

}  // namespace mtq
