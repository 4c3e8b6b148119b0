#pragma once

#include <Eigen/Core>
#include <string>

namespace lcvar {

// Plain numeric CSV: one matrix row per line, comma-separated decimal reals,
// no header. Values are written with 17 significant digits so a write/read
// round trip reproduces every double bit-exactly.
Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& m);

// Formats a double with enough digits for an exact round trip.
std::string format_double(double v);

}  // namespace lcvar
