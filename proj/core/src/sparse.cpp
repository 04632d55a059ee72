#include "trsat/sparse.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace trsat {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<std::tuple<int, int, double>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
              });
    SparseMatrix m(rows, cols);
    int prev_r = -1, prev_c = -1;
    for (const auto& [r, c, v] : entries) {
        if (r < 0 || r >= rows || c < 0 || c >= cols) throw Error("sparse: triplet index out of range");
        if (r == prev_r && c == prev_c) throw Error("sparse: duplicate (row, col) triplet");
        prev_r = r;
        prev_c = c;
        ++m.row_ptr[r + 1];
        m.col_idx.push_back(c);
        m.values.push_back(v);
    }
    for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
    return from_triplets(n, n, std::move(t));
}

double SparseMatrix::at(int r, int c) const {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (col_idx[k] == c) return values[k];
    return 0.0;
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<std::tuple<int, int, double>> t;
    t.reserve(nnz());
    for (int r = 0; r < rows; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) t.emplace_back(col_idx[k], r, values[k]);
    return from_triplets(cols, rows, std::move(t));
}

SparseMatrix SparseMatrix::binarized() const {
    std::vector<std::tuple<int, int, double>> t;
    for (int r = 0; r < rows; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (values[k] != 0.0) t.emplace_back(r, col_idx[k], 1.0);
    return from_triplets(rows, cols, std::move(t));
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
    std::vector<std::vector<double>> d(rows, std::vector<double>(cols, 0.0));
    for (int r = 0; r < rows; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d[r][col_idx[k]] = values[k];
    return d;
}

std::string SparseMatrix::to_coo_text() const {
    std::ostringstream out;
    for (int r = 0; r < rows; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            out << r << ' ' << col_idx[k] << ' ' << values[k] << '\n';
    return out.str();
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
    return rows == other.rows && cols == other.cols && row_ptr == other.row_ptr &&
           col_idx == other.col_idx;
}

SparseMatrix sparse_matmul(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols != b.rows)
        throw Error("sparse_matmul: dimension mismatch " + std::to_string(a.cols) + " vs " +
                    std::to_string(b.rows));
    SparseMatrix out(a.rows, b.cols);
    std::vector<double> acc(b.cols, 0.0);
    std::vector<char> seen(b.cols, 0);
    std::vector<int> touched;
    for (int r = 0; r < a.rows; ++r) {
        touched.clear();
        for (int ka = a.row_ptr[r]; ka < a.row_ptr[r + 1]; ++ka) {
            int k = a.col_idx[ka];
            double av = a.values[ka];
            for (int kb = b.row_ptr[k]; kb < b.row_ptr[k + 1]; ++kb) {
                int c = b.col_idx[kb];
                if (!seen[c]) {
                    seen[c] = 1;
                    touched.push_back(c);
                }
                acc[c] += av * b.values[kb];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int c : touched) {
            // Entries that cancel to zero stay structurally present so the
            // result's pattern reflects reachability, not coincidental sums.
            out.col_idx.push_back(c);
            out.values.push_back(acc[c]);
            acc[c] = 0.0;
            seen[c] = 0;
        }
        out.row_ptr[r + 1] = static_cast<int>(out.col_idx.size());
    }
    return out;
}

}  // namespace trsat
