#include "trsat/graph.hpp"

#include <tuple>

namespace trsat {

SignedBiAdjacency build_biadjacency(const CnfFormula& f) {
    std::vector<std::tuple<int, int, double>> plus, minus;
    for (int j = 0; j < f.num_clauses(); ++j)
        for (const Literal& l : f.clauses[j].literals)
            (l.polarity > 0 ? plus : minus).emplace_back(l.variable - 1, j, 1.0);
    SignedBiAdjacency b;
    b.a_plus = SparseMatrix::from_triplets(f.num_variables, f.num_clauses(), std::move(plus));
    b.a_minus = SparseMatrix::from_triplets(f.num_variables, f.num_clauses(), std::move(minus));
    return b;
}

MetaPathSet meta_paths(const SignedBiAdjacency& b) {
    const SparseMatrix* a[2] = {&b.a_plus, &b.a_minus};
    SparseMatrix at[2] = {b.a_plus.transposed(), b.a_minus.transposed()};
    MetaPathSet mp;
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            int idx = s * 2 + t;  // PP, PM, MP, MM
            mp.var_counts[idx] = sparse_matmul(*a[s], at[t]);
            mp.clause_counts[idx] = sparse_matmul(at[s], *a[t]);
            mp.var_topology[idx] = mp.var_counts[idx].binarized();
            mp.clause_topology[idx] = mp.clause_counts[idx].binarized();
        }
    return mp;
}

}  // namespace trsat
