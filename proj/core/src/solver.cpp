#include "trsat/solver.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace trsat {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::satisfied: return "satisfied";
        case SolveStatus::partial: return "partial";
        case SolveStatus::unsolvable_reported: return "unsolvable_reported";
    }
    return "?";
}

std::pair<Assignment, CompletionStats> solve_max_sat(TrsatModel& model, const CnfFormula& f,
                                                     uint64_t instance_seed) {
    SignedBiAdjacency b = build_biadjacency(f);
    MetaPathSet mp = meta_paths(b);
    ForwardResult r = forward(model, f, b, mp, instance_seed);
    Assignment a = threshold(r.outputs, model.config.epsilon_threshold);
    return {a, count_satisfied(f, a)};
}

SatResult solve_exact(TrsatModel& model, const CnfFormula& f, int max_iters, uint64_t seed) {
    if (max_iters < 1) throw Error("solve_exact: max_iters must be >= 1");
    const int n = f.num_variables;
    const int m = f.num_clauses();

    std::vector<int> active_clauses(m);
    for (int j = 0; j < m; ++j) active_clauses[j] = j;
    std::vector<int> active_vars(n);
    for (int i = 0; i < n; ++i) active_vars[i] = i + 1;
    Assignment values(n, false);

    SatResult res;
    Assignment best = values;
    int best_count = count_satisfied(f, best).satisfied;

    for (int iter = 1; iter <= max_iters; ++iter) {
        // Re-index the active subproblem densely.
        std::vector<int> var_of_dense(active_vars);  // dense index -> original var
        std::vector<int> dense_of_var(n + 1, 0);
        for (size_t i = 0; i < var_of_dense.size(); ++i) dense_of_var[var_of_dense[i]] = int(i) + 1;
        std::vector<Clause> sub_clauses;
        for (int j : active_clauses) {
            std::vector<Literal> lits;
            for (const Literal& l : f.clauses[j].literals)
                lits.emplace_back(dense_of_var[l.variable], l.polarity);
            sub_clauses.emplace_back(std::move(lits));
        }
        CnfFormula sub(static_cast<int>(var_of_dense.size()), std::move(sub_clauses));

        auto [sub_assignment, sub_stats] = solve_max_sat(model, sub, seed + iter);
        for (size_t i = 0; i < var_of_dense.size(); ++i)
            values[var_of_dense[i] - 1] = sub_assignment[i];

        IterationRecord rec;
        rec.remaining_vars = static_cast<int>(active_vars.size());
        rec.remaining_clauses = static_cast<int>(active_clauses.size());

        CompletionStats full = count_satisfied(f, values);
        if (full.satisfied > best_count) {
            best_count = full.satisfied;
            best = values;
        }

        // Unsolved clauses of the current subproblem.
        std::vector<int> unsolved;  // original clause indices
        for (size_t jj = 0; jj < active_clauses.size(); ++jj) {
            int j = active_clauses[jj];
            bool sat = false;
            for (const Literal& l : f.clauses[j].literals)
                if ((l.polarity > 0) == values[l.variable - 1]) {
                    sat = true;
                    break;
                }
            if (!sat) unsolved.push_back(j);
        }

        if (unsolved.empty()) {
            res.iterations = iter;
            res.trace.push_back(rec);
            CompletionStats check = count_satisfied(f, values);
            if (check.satisfied == m) {
                res.status = SolveStatus::satisfied;
                res.assignment = values;
                res.satisfied_count = m;
            } else {
                // The removal rule dropped a clause whose support later
                // flipped; refuse the satisfied claim.
                res.status = SolveStatus::partial;
                res.assignment = best;
                res.satisfied_count = best_count;
            }
            return res;
        }

        std::set<int> v_u;  // original vars of unsolved clauses
        for (int j : unsolved)
            for (const Literal& l : f.clauses[j].literals) v_u.insert(l.variable);

        bool any_outside = false;
        for (int v : active_vars)
            if (!v_u.count(v)) {
                any_outside = true;
                break;
            }
        if (!any_outside) {
            res.status = SolveStatus::unsolvable_reported;
            res.assignment = best;
            res.satisfied_count = best_count;
            res.iterations = iter;
            res.trace.push_back(rec);
            return res;
        }

        // Drop satisfied clauses that touch a variable outside V_u.
        std::vector<int> kept;
        std::set<int> unsolved_set(unsolved.begin(), unsolved.end());
        for (int j : active_clauses) {
            if (unsolved_set.count(j)) {
                kept.push_back(j);
                continue;
            }
            bool touches_outside = false;
            for (const Literal& l : f.clauses[j].literals)
                if (!v_u.count(l.variable)) {
                    touches_outside = true;
                    break;
                }
            if (!touches_outside) kept.push_back(j);
        }

        std::set<int> new_vars;
        for (int j : kept)
            for (const Literal& l : f.clauses[j].literals) new_vars.insert(l.variable);

        rec.newly_fixed_vars = static_cast<int>(active_vars.size() - new_vars.size());
        res.trace.push_back(rec);

        if (kept.size() >= active_clauses.size()) {  // no progress
            res.status = SolveStatus::partial;
            res.assignment = best;
            res.satisfied_count = best_count;
            res.iterations = iter;
            return res;
        }

        active_clauses = std::move(kept);
        active_vars.assign(new_vars.begin(), new_vars.end());
    }

    res.status = SolveStatus::partial;
    res.assignment = best;
    res.satisfied_count = best_count;
    res.iterations = max_iters;
    return res;
}

bool verify_result(const CnfFormula& f_original, const SatResult& r) {
    if (r.status != SolveStatus::satisfied) return true;  // only the satisfied claim is checked
    if (static_cast<int>(r.assignment.size()) != f_original.num_variables) return false;
    return count_satisfied(f_original, r.assignment).satisfied == f_original.num_clauses();
}

std::string result_report(const CnfFormula& f, const SatResult& r) {
    std::ostringstream out;
    out << "status " << to_string(r.status) << '\n';
    CompletionStats cs = count_satisfied(f, r.assignment);
    out << "satisfied " << cs.satisfied << " of " << cs.total << '\n';
    out << "iterations " << r.iterations << '\n';
    out << "v";
    for (size_t i = 0; i < r.assignment.size(); ++i)
        out << ' ' << (r.assignment[i] ? int(i) + 1 : -(int(i) + 1));
    out << " 0\n";
    for (size_t i = 0; i < r.trace.size(); ++i)
        out << "iter " << i + 1 << " vars " << r.trace[i].remaining_vars << " clauses "
            << r.trace[i].remaining_clauses << " fixed " << r.trace[i].newly_fixed_vars << '\n';
    return out.str();
}

}  // namespace trsat
