#pragma once

#include <optional>
#include <string>

#include "trsat/cnf.hpp"

namespace trsat {

enum class ExternalStatus { satisfiable, unsatisfiable, unknown };

struct ExternalResult {
    ExternalStatus status = ExternalStatus::unknown;
    std::optional<Assignment> assignment;
    int exit_code = 0;
};

// Spawn `solver_binary <cnf_path>` and parse the standard competition
// output ("s SATISFIABLE" / "s UNSATISFIABLE", "v ..." literal lines).
ExternalResult run_external_solver(const std::string& solver_binary, const std::string& cnf_path,
                                   int num_variables);

}  // namespace trsat
