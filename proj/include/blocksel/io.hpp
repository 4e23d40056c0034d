#ifndef BLOCKSEL_IO_HPP
#define BLOCKSEL_IO_HPP

#include <string>
#include <vector>

#include "blocksel/types.hpp"

namespace blocksel {

/// Comma-separated numeric matrix, no header, UTF-8. Parse failures carry a
/// line/column location.
Matrix read_csv_matrix(const std::string& path);

/// Single numeric column (or one comma-separated row).
Vector read_csv_vector(const std::string& path);

/// Integer list: one value per line or comma-separated.
std::vector<int> read_csv_ints(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string matrix_to_csv(const Matrix& m);

}  // namespace blocksel

#endif  // BLOCKSEL_IO_HPP
