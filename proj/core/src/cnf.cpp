#include "trsat/cnf.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace trsat {

Clause::Clause(std::vector<Literal> lits) {
    if (lits.empty()) throw Error("clause: empty clause");
    std::vector<Literal> kept;
    kept.reserve(lits.size());
    for (const Literal& l : lits) {
        bool dup = false;
        for (const Literal& k : kept) {
            if (k.variable != l.variable) continue;
            if (k.polarity != l.polarity)
                throw Error("clause: tautology, variable " + std::to_string(l.variable) +
                            " occurs with both polarities");
            dup = true;
            break;
        }
        if (dup) {
            std::cerr << "warning: duplicate literal " << l.dimacs() << " dropped from clause\n";
            continue;
        }
        kept.push_back(l);
    }
    literals = std::move(kept);
}

CnfFormula::CnfFormula(int n, std::vector<Clause> cls) : num_variables(n), clauses(std::move(cls)) {
    if (clauses.empty()) throw Error("formula: must have at least one clause");
    for (const Clause& c : clauses)
        for (const Literal& l : c.literals)
            if (l.variable > num_variables)
                throw Error("formula: variable " + std::to_string(l.variable) + " exceeds declared count " +
                            std::to_string(num_variables));
}

CnfFormula parse_dimacs(std::istream& in) {
    int n = -1, m = -1;
    std::vector<Clause> clauses;
    std::vector<Literal> current;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c") continue;
        if (tok[0] == 'c') continue;
        if (tok == "p") {
            if (n >= 0) throw ParseError("dimacs: duplicate header at line " + std::to_string(lineno));
            std::string fmt;
            if (!(ls >> fmt >> n >> m) || fmt != "cnf" || n < 0 || m < 0)
                throw ParseError("dimacs: malformed header at line " + std::to_string(lineno));
            continue;
        }
        if (n < 0) throw ParseError("dimacs: clause data before 'p cnf' header at line " + std::to_string(lineno));
        // Literals may continue on the current line.
        std::istringstream body(line);
        int code;
        while (body >> code) {
            if (code == 0) {
                if (current.empty())
                    throw ParseError("dimacs: empty clause at line " + std::to_string(lineno));
                for (const Literal& l : current)
                    if (l.variable > n)
                        throw ParseError("dimacs: variable " + std::to_string(l.variable) +
                                         " exceeds declared count " + std::to_string(n));
                clauses.emplace_back(std::move(current));
                current.clear();
            } else {
                current.push_back(Literal::from_dimacs(code));
            }
        }
        if (body.fail() && !body.eof())
            throw ParseError("dimacs: non-integer token at line " + std::to_string(lineno));
    }
    if (n < 0) throw ParseError("dimacs: missing 'p cnf' header");
    if (!current.empty()) throw ParseError("dimacs: unterminated clause at end of input");
    if (static_cast<int>(clauses.size()) != m)
        throw ParseError("dimacs: clause count mismatch, declared " + std::to_string(m) + " found " +
                         std::to_string(clauses.size()));
    return CnfFormula(n, std::move(clauses));
}

CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

CnfFormula parse_dimacs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return parse_dimacs(in);
}

std::string write_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    out << "p cnf " << f.num_variables << ' ' << f.num_clauses() << '\n';
    for (const Clause& c : f.clauses) {
        for (const Literal& l : c.literals) out << l.dimacs() << ' ';
        out << "0\n";
    }
    return out.str();
}

void write_dimacs_file(const CnfFormula& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open file for write: " + path);
    out << write_dimacs(f);
}

CompletionStats count_satisfied(const CnfFormula& f, const Assignment& a) {
    if (static_cast<int>(a.size()) != f.num_variables)
        throw Error("count_satisfied: assignment length " + std::to_string(a.size()) +
                    " != variable count " + std::to_string(f.num_variables));
    CompletionStats s;
    s.total = f.num_clauses();
    for (int j = 0; j < f.num_clauses(); ++j) {
        bool sat = false;
        for (const Literal& l : f.clauses[j].literals) {
            bool v = a[l.variable - 1];
            if ((l.polarity > 0) == v) {
                sat = true;
                break;
            }
        }
        if (sat)
            ++s.satisfied;
        else
            s.unsat_clause_ids.push_back(j + 1);
    }
    s.completion_rate = s.total ? static_cast<double>(s.satisfied) / s.total : 0.0;
    return s;
}

MaxSatOracleResult brute_force_max_sat(const CnfFormula& f, int variable_cap) {
    const int n = f.num_variables;
    if (n > variable_cap)
        throw Error("oracle: " + std::to_string(n) + " variables exceeds cap " + std::to_string(variable_cap));
    // Per-clause bitmasks: clause satisfied under a iff (a & pos) | (~a & neg).
    const int m = f.num_clauses();
    std::vector<uint32_t> pos(m, 0), neg(m, 0);
    for (int j = 0; j < m; ++j)
        for (const Literal& l : f.clauses[j].literals) {
            uint32_t bit = 1u << (l.variable - 1);
            (l.polarity > 0 ? pos[j] : neg[j]) |= bit;
        }
    int best = -1;
    uint64_t best_a = 0;
    const uint64_t limit = n >= 1 ? (uint64_t{1} << n) : 1;
    for (uint64_t a = 0; a < limit; ++a) {
        int cnt = 0;
        for (int j = 0; j < m; ++j)
            if ((static_cast<uint32_t>(a) & pos[j]) || (~static_cast<uint32_t>(a) & neg[j])) ++cnt;
        if (cnt > best) {  // ascending scan: strict '>' keeps the lowest tie
            best = cnt;
            best_a = a;
            if (best == m) break;
        }
    }
    MaxSatOracleResult r;
    r.best_count = best;
    r.witness.resize(n);
    for (int i = 0; i < n; ++i) r.witness[i] = (best_a >> i) & 1;
    return r;
}

}  // namespace trsat
