#pragma once

#include <string>
#include <vector>

#include "trsat/model.hpp"

namespace trsat {

enum class SolveStatus { satisfied, partial, unsolvable_reported };

struct IterationRecord {
    int remaining_vars = 0;     // at iteration start
    int remaining_clauses = 0;  // at iteration start
    int newly_fixed_vars = 0;   // frozen by this iteration's reduction
};

struct SatResult {
    SolveStatus status = SolveStatus::partial;
    Assignment assignment;  // over the original variables
    int satisfied_count = 0;
    int iterations = 0;
    std::vector<IterationRecord> trace;
};

const char* to_string(SolveStatus s);

// One forward pass plus thresholding. Pure inference.
std::pair<Assignment, CompletionStats> solve_max_sat(TrsatModel& model, const CnfFormula& f,
                                                     uint64_t instance_seed);

// Iterative clause-removal loop: repeat one-shot MaxSAT, drop satisfied
// clauses touching variables outside the unsolved set, freeze the removed
// variables' values, re-index, continue. Guards added on top of the
// printed loop: max_iters bound, a no-progress stop, and a final
// re-verification gate before claiming satisfied (downgrades to partial
// otherwise). Per-iteration noise seed is seed + iteration.
SatResult solve_exact(TrsatModel& model, const CnfFormula& f, int max_iters, uint64_t seed);

// Soundness gate: a satisfied claim must re-evaluate to all clauses true
// on the original formula.
bool verify_result(const CnfFormula& f_original, const SatResult& r);

// Text report: status, literal list, satisfied/total, iteration trace.
std::string result_report(const CnfFormula& f, const SatResult& r);

}  // namespace trsat
