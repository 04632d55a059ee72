#include <doctest.h>

#include "test_util.hpp"
#include "trsat/generators.hpp"
#include "trsat/graph.hpp"

using namespace trsat;
using namespace trsat::testutil;

TEST_CASE("biadjacency of the running example") {
    SignedBiAdjacency b = build_biadjacency(fig2_formula());
    CHECK(b.a_plus.rows == 4);
    CHECK(b.a_plus.cols == 3);
    // (x1 | x2 | !x4)(!x1 | x2 | !x3)(x3 | x4)
    auto p = b.a_plus.to_dense();
    auto m = b.a_minus.to_dense();
    std::vector<std::vector<double>> want_p = {
        {1, 0, 0}, {1, 1, 0}, {0, 0, 1}, {0, 0, 1}};
    std::vector<std::vector<double>> want_m = {
        {0, 1, 0}, {0, 0, 0}, {0, 1, 0}, {1, 0, 0}};
    CHECK(p == want_p);
    CHECK(m == want_m);
    // A+ and A- never overlap.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) CHECK(p[i][j] * m[i][j] == 0.0);
}

TEST_CASE("biadjacency of single-literal formulas") {
    SignedBiAdjacency b = build_biadjacency(parse_dimacs("p cnf 1 1\n1 0\n"));
    CHECK(b.a_plus.to_dense() == std::vector<std::vector<double>>{{1}});
    CHECK(b.a_minus.to_dense() == std::vector<std::vector<double>>{{0}});

    SignedBiAdjacency c = build_biadjacency(parse_dimacs("p cnf 2 1\n-1 -2 0\n"));
    CHECK(c.a_plus.nnz() == 0);
    CHECK(c.a_minus.nnz() == 2);
}

TEST_CASE("biadjacency nnz counts literal occurrences") {
    for (uint64_t s = 0; s < 20; ++s) {
        CnfFormula f = gen_random_3sat(10, 30, s);
        SignedBiAdjacency b = build_biadjacency(f);
        int lits = 0;
        for (const Clause& c : f.clauses) lits += int(c.literals.size());
        CHECK(b.a_plus.nnz() + b.a_minus.nnz() == lits);
    }
}

TEST_CASE("meta-path counts on the running example") {
    MetaPathSet mp = meta_paths(build_biadjacency(fig2_formula()));

    auto vpp = mp.var_counts[0].to_dense();
    std::vector<std::vector<double>> want_vpp = {
        {1, 1, 0, 0}, {1, 2, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}};
    CHECK(vpp == want_vpp);

    auto vpm = mp.var_counts[1].to_dense();
    std::vector<std::vector<double>> want_vpm = {
        {0, 0, 0, 1}, {1, 0, 1, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}};
    CHECK(vpm == want_vpm);

    // (-,+) is the transpose of (+,-).
    CHECK(mp.var_counts[2].to_dense() ==
          std::vector<std::vector<double>>{
              {0, 1, 0, 0}, {0, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 0, 0}});

    auto vmm = mp.var_counts[3].to_dense();
    std::vector<std::vector<double>> want_vmm = {
        {1, 0, 1, 0}, {0, 0, 0, 0}, {1, 0, 1, 0}, {0, 0, 0, 1}};
    CHECK(vmm == want_vmm);

    auto cpp = mp.clause_counts[0].to_dense();
    CHECK(cpp == std::vector<std::vector<double>>{{2, 1, 0}, {1, 1, 0}, {0, 0, 2}});
    auto cpm = mp.clause_counts[1].to_dense();
    CHECK(cpm == std::vector<std::vector<double>>{{0, 1, 0}, {0, 0, 0}, {1, 1, 0}});
    auto cmm = mp.clause_counts[3].to_dense();
    CHECK(cmm == std::vector<std::vector<double>>{{1, 0, 0}, {0, 2, 0}, {0, 0, 0}});
}

TEST_CASE("topologies are binarized counts") {
    MetaPathSet mp = meta_paths(build_biadjacency(fig2_formula()));
    for (int i = 0; i < 4; ++i) {
        CHECK(mp.var_topology[i] == mp.var_counts[i].binarized());
        CHECK(mp.clause_topology[i] == mp.clause_counts[i].binarized());
        for (double v : mp.var_topology[i].values) CHECK(v == 1.0);
    }
    CHECK(mp.var_side(PathType::PP) == mp.var_topology[0]);
    CHECK(mp.clause_side(PathType::MM) == mp.clause_topology[3]);
}

TEST_CASE("diagonals equal per-polarity degrees") {
    for (uint64_t s = 0; s < 10; ++s) {
        CnfFormula f = gen_random_3sat(12, 40, s);
        SignedBiAdjacency b = build_biadjacency(f);
        MetaPathSet mp = meta_paths(b);
        for (int i = 0; i < f.num_variables; ++i) {
            double dp = 0.0, dm = 0.0;
            for (int j = 0; j < f.num_clauses(); ++j) {
                dp += b.a_plus.at(i, j);
                dm += b.a_minus.at(i, j);
            }
            CHECK(mp.var_counts[0].at(i, i) == dp);
            CHECK(mp.var_counts[3].at(i, i) == dm);
        }
    }
}

TEST_CASE("unit clauses produce no cross-variable paths") {
    CnfFormula f = parse_dimacs("p cnf 2 2\n1 0\n-2 0\n");
    MetaPathSet mp = meta_paths(build_biadjacency(f));
    CHECK(mp.var_counts[0].to_dense() == std::vector<std::vector<double>>{{1, 0}, {0, 0}});
    CHECK(mp.var_counts[3].to_dense() == std::vector<std::vector<double>>{{0, 0}, {0, 1}});
    CHECK(mp.var_counts[1].nnz() == 0);
    CHECK(mp.var_counts[2].nnz() == 0);
    CHECK(mp.clause_counts[0].to_dense() == std::vector<std::vector<double>>{{1, 0}, {0, 0}});
}

TEST_CASE("mixed-polarity pair connects along (+,-) paths") {
    // (x1 | !x2): x1 reaches x2 along (+,-), x2 reaches x1 along (-,+).
    CnfFormula f = parse_dimacs("p cnf 2 1\n1 -2 0\n");
    MetaPathSet mp = meta_paths(build_biadjacency(f));
    CHECK(mp.var_counts[1].at(0, 1) == 1.0);
    CHECK(mp.var_counts[2].at(1, 0) == 1.0);
    CHECK(mp.var_counts[0].at(0, 1) == 0.0);
}

TEST_CASE("meta-paths equal brute-force signed path enumeration") {
    for (uint64_t s = 0; s < 40; ++s) {
        CnfFormula f = gen_random_3sat(int(6 + s % 10), int(12 + 3 * (s % 7)), 500 + s);
        MetaPathSet mp = meta_paths(build_biadjacency(f));
        DenseMetaPaths ref = meta_paths_brute(f);
        for (int t = 0; t < 4; ++t) {
            CHECK(mp.var_counts[t].to_dense() == ref.var_counts[t]);
            CHECK(mp.clause_counts[t].to_dense() == ref.clause_counts[t]);
        }
    }
}

TEST_CASE("symmetry relations between path types") {
    for (uint64_t s = 0; s < 10; ++s) {
        CnfFormula f = gen_random_3sat(10, 30, 900 + s);
        MetaPathSet mp = meta_paths(build_biadjacency(f));
        // (s,t) counts transpose to (t,s) on both sides.
        CHECK(mp.var_counts[1].transposed() == mp.var_counts[2]);
        CHECK(mp.var_counts[0].transposed() == mp.var_counts[0]);
        CHECK(mp.var_counts[3].transposed() == mp.var_counts[3]);
        CHECK(mp.clause_counts[1].transposed() == mp.clause_counts[2]);
    }
}
