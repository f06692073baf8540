#pragma once

#include "stls/linalg.hpp"
#include "stls/permutation.hpp"

#include <iosfwd>
#include <string>

namespace stls::io {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Matrix CSV: first line "rows,cols", then one comma-separated row per line.
void write_matrix(std::ostream& out, const Matrix& M);
void write_matrix(const std::string& path, const Matrix& M);
Matrix read_matrix(std::istream& in);
Matrix read_matrix(const std::string& path);

/// Permutation file: one index per line.
void write_permutation(std::ostream& out, const Permutation& pi);
void write_permutation(const std::string& path, const Permutation& pi);
Permutation read_permutation(std::istream& in);
Permutation read_permutation(const std::string& path);

} // namespace stls::io
