#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace trsat {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

// A signed variable occurrence. Variables are 1-based at this level,
// matching DIMACS; matrix/row indices subtract 1 at the graph boundary.
struct Literal {
    int variable = 1;  // >= 1
    int polarity = 1;  // +1 or -1

    Literal() = default;
    Literal(int var, int pol) : variable(var), polarity(pol) {
        if (var < 1) throw Error("literal: variable index must be >= 1");
        if (pol != 1 && pol != -1) throw Error("literal: polarity must be +1 or -1");
    }
    // DIMACS-style signed integer, e.g. -3 means (var 3, polarity -1).
    static Literal from_dimacs(int code) {
        if (code == 0) throw Error("literal: 0 is not a literal");
        return Literal(code < 0 ? -code : code, code < 0 ? -1 : 1);
    }
    int dimacs() const { return polarity * variable; }
    bool operator==(const Literal&) const = default;
};

// Non-empty disjunction. Tautologies (x and !x together) are rejected;
// duplicate literals are collapsed with a warning on stderr.
struct Clause {
    std::vector<Literal> literals;

    Clause() = default;
    explicit Clause(std::vector<Literal> lits);
    bool operator==(const Clause&) const = default;
};

struct CnfFormula {
    int num_variables = 0;
    std::vector<Clause> clauses;

    CnfFormula() = default;
    CnfFormula(int n, std::vector<Clause> cls);
    int num_clauses() const { return static_cast<int>(clauses.size()); }
    bool operator==(const CnfFormula&) const = default;
};

// values[i] is the value of variable i+1.
using Assignment = std::vector<bool>;

struct CompletionStats {
    int satisfied = 0;
    int total = 0;
    double completion_rate = 0.0;
    std::vector<int> unsat_clause_ids;  // 1-based clause ids, ascending
};

CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(const std::string& text);
CnfFormula parse_dimacs_file(const std::string& path);

std::string write_dimacs(const CnfFormula& f);
void write_dimacs_file(const CnfFormula& f, const std::string& path);

CompletionStats count_satisfied(const CnfFormula& f, const Assignment& a);

struct MaxSatOracleResult {
    int best_count = 0;
    Assignment witness;
};

// Exhaustive 2^n scan. Ties go to the assignment with the lowest binary
// value (bit i = variable i+1), so the result is deterministic.
MaxSatOracleResult brute_force_max_sat(const CnfFormula& f, int variable_cap = 24);

}  // namespace trsat
