#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "trsat/generators.hpp"
#include "trsat/loss.hpp"

using namespace trsat;
using namespace trsat::testutil;

TEST_CASE("literal value") {
    CHECK(literal_value(0.3, 1) == 0.3);
    CHECK(literal_value(0.3, -1) == doctest::Approx(0.7));
    CHECK(literal_value(1.0, -1) == 0.0);
    CHECK(literal_value(0.0, -1) == 1.0);
    CHECK_THROWS_AS(literal_value(0.5, 0), Error);
}

TEST_CASE("smoothmax of constants is the constant") {
    for (double c : {0.0, 0.25, 1.0, -3.0})
        for (double tau : {1.0, 5.0, 25.0})
            CHECK(smoothmax({c, c, c}, tau) == doctest::Approx(c).epsilon(1e-15));
    CHECK(smoothmax({0.7}, 5.0) == doctest::Approx(0.7));
}

TEST_CASE("smoothmax closed form for {0,1} at tau=5") {
    // e^5 / (1 + e^5)
    double want = std::exp(5.0) / (1.0 + std::exp(5.0));
    CHECK(smoothmax({0.0, 1.0}, 5.0) == doctest::Approx(want).epsilon(1e-15));
    CHECK(smoothmax({0.0, 1.0}, 5.0) == doctest::Approx(0.993307).epsilon(1e-6));
    CHECK(smoothmax({1.0, 0.0}, 5.0) == doctest::Approx(want));
}

TEST_CASE("smoothmax input validation") {
    CHECK_THROWS_AS(smoothmax({}, 5.0), Error);
    CHECK_THROWS_AS(smoothmax({0.5}, 0.0), Error);
    CHECK_THROWS_AS(smoothmax({0.5}, -1.0), Error);
    CHECK_THROWS_AS(smoothmax({std::nan("")}, 5.0), Error);
}

TEST_CASE("smoothmax approaches max as tau grows") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> v = {u(rng), u(rng), u(rng)};
        double mx = std::max({v[0], v[1], v[2]});
        double e1 = std::abs(smoothmax(v, 1.0) - mx);
        double e5 = std::abs(smoothmax(v, 5.0) - mx);
        double e25 = std::abs(smoothmax(v, 25.0) - mx);
        CHECK(e5 <= e1 + 1e-15);
        CHECK(e25 <= e5 + 1e-15);
        // Bounded by min and max of the inputs.
        CHECK(smoothmax(v, 5.0) >= std::min({v[0], v[1], v[2]}) - 1e-12);
        CHECK(smoothmax(v, 5.0) <= mx + 1e-12);
    }
}

TEST_CASE("smoothmax is stable for large magnitudes") {
    CHECK(std::isfinite(smoothmax({1000.0, -1000.0}, 5.0)));
    CHECK(smoothmax({1000.0, -1000.0}, 5.0) == doctest::Approx(1000.0));
}

TEST_CASE("phi approx on the running example") {
    CnfFormula f = fig2_formula();
    // All-0.5 input: every clause scores 0.5, product is 0.125.
    CHECK(phi_approx({0.5, 0.5, 0.5, 0.5}, f, 5.0) == doctest::Approx(0.125).epsilon(1e-12));
    // A satisfying point scores close to 1.
    CHECK(phi_approx({0.0, 1.0, 1.0, 0.0}, f, 25.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("neg log loss closed form on the running example") {
    CnfFormula f = fig2_formula();
    double l = neg_log_loss({0.5, 0.5, 0.5, 0.5}, f, 5.0);
    CHECK(l == doctest::Approx(-3.0 * std::log(0.5)).epsilon(1e-9));
    CHECK(l == doctest::Approx(2.07944).epsilon(1e-5));
}

TEST_CASE("neg log loss of a satisfied unit clause is zero") {
    CnfFormula f = parse_dimacs("p cnf 1 1\n1 0\n");
    CHECK(neg_log_loss({1.0}, f, 5.0) == doctest::Approx(0.0).epsilon(1e-15));
    // Fully violated clause is clamped, not infinite.
    CHECK(std::isfinite(neg_log_loss({0.0}, f, 5.0)));
    CHECK(neg_log_loss({0.0}, f, 5.0) <= -std::log(1e-12) + 1e-9);
}

TEST_CASE("loss decreases toward satisfying corners") {
    CnfFormula f = fig2_formula();
    double mid = neg_log_loss({0.5, 0.5, 0.5, 0.5}, f, 5.0);
    double good = neg_log_loss({0.0, 1.0, 1.0, 0.0}, f, 5.0);
    CHECK(good < mid);
}

TEST_CASE("loss and loss-free phi are consistent") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (uint64_t s = 0; s < 20; ++s) {
        CnfFormula f = gen_random_3sat(8, 20, s);
        std::vector<double> x(8);
        for (double& v : x) v = u(rng);
        double l = neg_log_loss(x, f, 5.0);
        CHECK(l == doctest::Approx(-std::log(phi_approx(x, f, 5.0))).epsilon(1e-9));
        CHECK(l >= -1e-12);
    }
}

TEST_CASE("loss validates input length") {
    CHECK_THROWS_AS(neg_log_loss({0.5}, fig2_formula(), 5.0), Error);
}
