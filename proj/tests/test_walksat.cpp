#include <doctest.h>

#include "test_util.hpp"
#include "trsat/generators.hpp"
#include "trsat/walksat.hpp"

using namespace trsat;
using namespace trsat::testutil;

TEST_CASE("walksat solves trivial formulas") {
    CnfFormula f = parse_dimacs("p cnf 2 2\n1 0\n1 2 0\n");
    WalkSatConfig cfg;
    cfg.seed = 1;
    WalkSatResult r = walksat(f, cfg);
    REQUIRE(r.assignment.has_value());
    CHECK(is_satisfying(f, *r.assignment));
    CHECK((*r.assignment)[0] == true);
}

TEST_CASE("walksat gives up on an unsatisfiable core") {
    CnfFormula f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n");
    WalkSatConfig cfg;
    cfg.max_flips = 2000;
    cfg.restarts = 3;
    cfg.seed = 2;
    WalkSatResult r = walksat(f, cfg);
    CHECK(!r.assignment.has_value());
    CHECK(r.flips == 2000 * 3);
}

TEST_CASE("walksat input validation") {
    CnfFormula f = parse_dimacs("p cnf 1 1\n1 0\n");
    WalkSatConfig cfg;
    cfg.max_flips = 0;
    CHECK_THROWS_AS(walksat(f, cfg), Error);
    cfg.max_flips = 10;
    cfg.noise_p = 1.5;
    CHECK_THROWS_AS(walksat(f, cfg), Error);
}

TEST_CASE("walksat is deterministic per seed") {
    CnfFormula f = gen_random_3sat(15, 50, 4);
    WalkSatConfig cfg;
    cfg.seed = 77;
    WalkSatResult a = walksat(f, cfg);
    WalkSatResult b = walksat(f, cfg);
    CHECK(a.assignment == b.assignment);
    CHECK(a.flips == b.flips);
}

TEST_CASE("a larger flip budget never loses a solution (prefix property)") {
    for (uint64_t s = 0; s < 10; ++s) {
        CnfFormula f = gen_random_3sat(12, 40, 40 + s);
        WalkSatConfig small;
        small.max_flips = 300;
        small.seed = s;
        WalkSatConfig big = small;
        big.max_flips = 5000;
        WalkSatResult rs = walksat(f, small);
        WalkSatResult rb = walksat(f, big);
        if (rs.assignment.has_value()) {
            REQUIRE(rb.assignment.has_value());
            CHECK(*rs.assignment == *rb.assignment);
            CHECK(rs.flips == rb.flips);
        }
    }
}

TEST_CASE("returned assignments always satisfy the formula") {
    int solved = 0;
    for (uint64_t s = 0; s < 40; ++s) {
        CnfFormula f = gen_random_3sat(20, 70, 100 + s);
        WalkSatConfig cfg;
        cfg.max_flips = 20000;
        cfg.seed = s;
        WalkSatResult r = walksat(f, cfg);
        if (r.assignment.has_value()) {
            ++solved;
            CHECK(is_satisfying(f, *r.assignment));
        }
    }
    CHECK(solved > 0);  // the regime m/n = 3.5 is mostly satisfiable
}

TEST_CASE("walksat agrees with the oracle on satisfiability of easy instances") {
    // At a loose ratio every satisfiable instance should fall quickly.
    int checked = 0;
    for (uint64_t s = 0; s < 15; ++s) {
        CnfFormula f = gen_random_3sat(10, 25, 200 + s);
        bool sat = brute_force_max_sat(f).best_count == f.num_clauses();
        if (!sat) continue;
        ++checked;
        WalkSatConfig cfg;
        cfg.max_flips = 50000;
        cfg.restarts = 2;
        cfg.seed = s;
        WalkSatResult r = walksat(f, cfg);
        CHECK(r.assignment.has_value());
    }
    CHECK(checked > 0);
}

TEST_CASE("flip counter accumulates across restarts") {
    CnfFormula f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n");
    WalkSatConfig cfg;
    cfg.max_flips = 7;
    cfg.restarts = 4;
    cfg.seed = 3;
    WalkSatResult r = walksat(f, cfg);
    CHECK(r.flips == 28);
}
