#pragma once

#include <string>
#include <vector>

#include "trsat/cnf.hpp"

namespace trsat {

// CSR with entries sorted by (row, col). Values are doubles; topology
// matrices hold 0/1.
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;  // size rows+1
    std::vector<int> col_idx;
    std::vector<double> values;

    SparseMatrix() = default;
    SparseMatrix(int r, int c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

    // entries must be unique (row, col); any order.
    static SparseMatrix from_triplets(int rows, int cols,
                                      std::vector<std::tuple<int, int, double>> entries);
    static SparseMatrix identity(int n);

    int nnz() const { return static_cast<int>(col_idx.size()); }
    double at(int r, int c) const;  // 0.0 when absent
    SparseMatrix transposed() const;
    // Drop explicit zeros and set every remaining value to 1.
    SparseMatrix binarized() const;
    std::vector<std::vector<double>> to_dense() const;
    // "row col value" per line, sorted by (row, col).
    std::string to_coo_text() const;

    bool same_pattern(const SparseMatrix& other) const;
    bool operator==(const SparseMatrix&) const = default;
};

SparseMatrix sparse_matmul(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace trsat
