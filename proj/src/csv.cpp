#include "rankdiff/csv.hpp"

#include <sstream>

namespace rankdiff::csv {

std::vector<std::vector<double>> read_numeric(const std::string& path,
                                              std::size_t expect_cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty csv file: " + path);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(expect_cols);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != expect_cols)
      throw std::runtime_error("bad column count in " + path + ": " + line);
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace rankdiff::csv
