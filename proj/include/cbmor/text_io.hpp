// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_TEXT_IO_HPP
#define CBMOR_TEXT_IO_HPP

#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace cbmor {

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double value);

/// Text matrix format: first line `rows cols`, then row-major
/// whitespace-separated decimals.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& is);

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_file(const std::string& path);

}  // namespace cbmor

#endif
