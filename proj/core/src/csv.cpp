#include "cyclogait/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cyclogait {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

void write_series(const std::filesystem::path& path,
                  const std::vector<std::pair<double, double>>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_series: cannot open " + path.string());
  for (const auto& [a, b] : points) out << g17(a) << " " << g17(b) << "\n";
  if (!out) throw std::runtime_error("write_series: write failed for " + path.string());
}

}  // namespace cyclogait
