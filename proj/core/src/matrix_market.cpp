#include "curos/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "curos/errors.hpp"

namespace curos::io {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

Eigen::SparseMatrix<double, Eigen::RowMajor> read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open Matrix Market file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    std::istringstream head(line);
    std::string banner, object, format, field, symmetry;
    head >> banner >> object >> format >> field >> symmetry;
    if (lower(banner) != "%%matrixmarket" || lower(object) != "matrix" || lower(format) != "coordinate")
        throw IoError(path + ": expected a '%%MatrixMarket matrix coordinate' header");
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "integer") throw IoError(path + ": only real or integer fields are supported");
    if (symmetry != "general" && symmetry != "symmetric")
        throw IoError(path + ": only general or symmetric storage is supported");

    long long rows = -1, cols = -1, nnz = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ss(line);
        if (!(ss >> rows >> cols >> nnz) || rows < 1 || cols < 1 || nnz < 0)
            throw IoError(path + ": malformed size line '" + line + "'");
        break;
    }
    if (rows < 1) throw IoError(path + ": missing size line");

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(symmetry == "symmetric" ? 2 * nnz : nnz));
    long long seen = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ss(line);
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(ss >> i >> j >> v)) throw IoError(path + ": malformed entry '" + line + "'");
        if (i < 1 || j < 1 || i > rows || j > cols) throw IoError(path + ": entry index out of range in '" + line + "'");
        trips.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
        if (symmetry == "symmetric" && i != j) trips.emplace_back(static_cast<Index>(j - 1), static_cast<Index>(i - 1), v);
        ++seen;
    }
    if (seen != nnz) throw IoError(path + ": expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));

    Eigen::SparseMatrix<double, Eigen::RowMajor> M(static_cast<Index>(rows), static_cast<Index>(cols));
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

Matrix read_text_matrix(const std::string& path, Index cols) {
    if (cols < 1) throw ArgumentError("read_text_matrix: cols must be positive");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<double> vals;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line[0] == '%') continue;
        std::istringstream ss(line);
        double v;
        Index count = 0;
        while (ss >> v) {
            vals.push_back(v);
            ++count;
        }
        if (!ss.eof()) throw IoError(path + ":" + std::to_string(lineno) + ": not a number");
        if (count == 0) continue;
        if (count != cols)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) + " values");
    }
    const Index rows = static_cast<Index>(vals.size()) / cols;
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) M(i, j) = vals[static_cast<std::size_t>(i * cols + j)];
    return M;
}

} // namespace curos::io
