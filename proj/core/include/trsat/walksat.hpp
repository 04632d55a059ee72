#pragma once

#include <cstdint>
#include <optional>

#include "trsat/cnf.hpp"

namespace trsat {

struct WalkSatConfig {
    long max_flips = 100000;
    double noise_p = 0.5;
    int restarts = 1;
    uint64_t seed = 0;
};

struct WalkSatResult {
    std::optional<Assignment> assignment;
    long flips = 0;  // total across restarts
};

// WalkSAT/SKC: pick a random unsatisfied clause; flip a zero-break variable
// if one exists, else with probability noise_p a random variable of the
// clause, else the minimum-break variable (ties to the lowest index).
WalkSatResult walksat(const CnfFormula& f, const WalkSatConfig& cfg);

}  // namespace trsat
