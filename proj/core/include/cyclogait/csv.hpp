#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cyclogait {

// 17 significant digits: doubles survive a write/read round trip bit-exactly.
std::string g17(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// Two-column whitespace-separated series, the plot-data format.
void write_series(const std::filesystem::path& path,
                  const std::vector<std::pair<double, double>>& points);

}  // namespace cyclogait
