#include "lcvar/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lcvar {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_matrix_csv: cannot open '" + path + "'");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos);
      const char* begin = cell.c_str();
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) {
        throw std::runtime_error("read_matrix_csv: '" + path + "': cannot parse cell '" +
                                 cell + "'");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("read_matrix_csv: '" + path + "': ragged rows (" +
                               std::to_string(row.size()) + " vs " +
                               std::to_string(rows.front().size()) + " columns)");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error("read_matrix_csv: '" + path + "' is empty");
  }
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_matrix_csv: cannot open '" + path + "' for writing");
  }
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("write_matrix_csv: write to '" + path + "' failed");
  }
}

}  // namespace lcvar
