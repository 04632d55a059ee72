#pragma once

#include <array>

#include "trsat/cnf.hpp"
#include "trsat/sparse.hpp"

namespace trsat {

// Bi-adjacency pair of the signed bipartite CNF graph: a_plus(i,j)=1 iff
// variable i+1 occurs positively in clause j, a_minus likewise for negated
// occurrences. The two never overlap (tautologies rejected upstream).
struct SignedBiAdjacency {
    SparseMatrix a_plus;   // n x m
    SparseMatrix a_minus;  // n x m
};

// Polarity pairs index the four meta-path types in a fixed order.
enum class PathType { PP = 0, PM = 1, MP = 2, MM = 3 };
constexpr std::array<PathType, 4> kAllPathTypes = {PathType::PP, PathType::PM, PathType::MP,
                                                   PathType::MM};

// Two-hop meta-path adjacencies. `topology` holds the binarized 0/1
// matrices used by attention; `counts` keeps the raw multiplication results
// (diagonals are per-polarity degrees, off-diagonals shared-clause counts).
struct MetaPathSet {
    std::array<SparseMatrix, 4> var_topology;     // n x n, indexed by PathType
    std::array<SparseMatrix, 4> clause_topology;  // m x m
    std::array<SparseMatrix, 4> var_counts;
    std::array<SparseMatrix, 4> clause_counts;

    const SparseMatrix& var_side(PathType t) const { return var_topology[static_cast<int>(t)]; }
    const SparseMatrix& clause_side(PathType t) const {
        return clause_topology[static_cast<int>(t)];
    }
};

SignedBiAdjacency build_biadjacency(const CnfFormula& f);

// var side (s,t) = binarize(A_s * A_t^T); clause side (s,t) = binarize(A_s^T * A_t).
MetaPathSet meta_paths(const SignedBiAdjacency& b);

}  // namespace trsat
