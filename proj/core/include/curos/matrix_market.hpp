#pragma once

#include <string>

#include <Eigen/SparseCore>

#include "curos/linalg.hpp"

namespace curos::io {

// Coordinate-format real Matrix Market file; symmetric storage is expanded.
// Throws IoError on unreadable or malformed input.
Eigen::SparseMatrix<double, Eigen::RowMajor> read_matrix_market(const std::string& path);

// Whitespace-separated reals, `cols` per line. Throws IoError on ragged
// input.
Matrix read_text_matrix(const std::string& path, Index cols);

} // namespace curos::io
