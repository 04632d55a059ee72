#include "trsat/walksat.hpp"

#include <random>

namespace trsat {

namespace {

struct State {
    const CnfFormula& f;
    Assignment a;
    std::vector<int> true_count;          // per clause
    std::vector<int> unsat;               // clause indices
    std::vector<int> unsat_pos;           // clause -> position in unsat, or -1
    std::vector<std::vector<int>> occur;  // var (0-based) -> clause indices

    explicit State(const CnfFormula& formula) : f(formula) {
        occur.resize(f.num_variables);
        for (int j = 0; j < f.num_clauses(); ++j)
            for (const Literal& l : f.clauses[j].literals) occur[l.variable - 1].push_back(j);
    }

    bool lit_true(const Literal& l) const { return (l.polarity > 0) == a[l.variable - 1]; }

    void reset(const Assignment& init) {
        a = init;
        true_count.assign(f.num_clauses(), 0);
        unsat.clear();
        unsat_pos.assign(f.num_clauses(), -1);
        for (int j = 0; j < f.num_clauses(); ++j) {
            for (const Literal& l : f.clauses[j].literals)
                if (lit_true(l)) ++true_count[j];
            if (true_count[j] == 0) {
                unsat_pos[j] = static_cast<int>(unsat.size());
                unsat.push_back(j);
            }
        }
    }

    void mark_sat(int j) {
        int pos = unsat_pos[j];
        if (pos < 0) return;
        int last = unsat.back();
        unsat[pos] = last;
        unsat_pos[last] = pos;
        unsat.pop_back();
        unsat_pos[j] = -1;
    }
    void mark_unsat(int j) {
        if (unsat_pos[j] >= 0) return;
        unsat_pos[j] = static_cast<int>(unsat.size());
        unsat.push_back(j);
    }

    // Clauses this flip would newly break (sole-support count).
    int break_count(int var) const {
        int breaks = 0;
        for (int j : occur[var - 1])
            if (true_count[j] == 1) {
                for (const Literal& l : f.clauses[j].literals)
                    if (l.variable == var && lit_true(l)) {
                        ++breaks;
                        break;
                    }
            }
        return breaks;
    }

    void flip(int var) {
        a[var - 1] = !a[var - 1];
        for (int j : occur[var - 1]) {
            for (const Literal& l : f.clauses[j].literals) {
                if (l.variable != var) continue;
                if (lit_true(l)) {
                    if (++true_count[j] == 1) mark_sat(j);
                } else {
                    if (--true_count[j] == 0) mark_unsat(j);
                }
                break;
            }
        }
    }
};

}  // namespace

WalkSatResult walksat(const CnfFormula& f, const WalkSatConfig& cfg) {
    if (cfg.max_flips < 1) throw Error("walksat: max_flips must be >= 1");
    if (cfg.noise_p < 0.0 || cfg.noise_p > 1.0) throw Error("walksat: noise_p must be in [0,1]");
    std::mt19937_64 rng(cfg.seed);
    const double scale = 1.0 / (static_cast<double>(std::mt19937_64::max()) + 1.0);
    auto coin = [&](double p) { return static_cast<double>(rng()) * scale < p; };

    State st(f);
    WalkSatResult result;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Assignment init(f.num_variables);
        for (int i = 0; i < f.num_variables; ++i) init[i] = rng() & 1;
        st.reset(init);
        for (long flip = 0; flip < cfg.max_flips; ++flip) {
            if (st.unsat.empty()) {
                result.assignment = st.a;
                return result;
            }
            int j = st.unsat[rng() % st.unsat.size()];
            const Clause& c = f.clauses[j];
            int chosen = 0;
            int best_break = -1;
            for (const Literal& l : c.literals) {  // lowest index wins ties
                int b = st.break_count(l.variable);
                if (best_break < 0 || b < best_break ||
                    (b == best_break && l.variable < chosen)) {
                    best_break = b;
                    chosen = l.variable;
                }
            }
            if (best_break > 0 && coin(cfg.noise_p))
                chosen = c.literals[rng() % c.literals.size()].variable;
            st.flip(chosen);
            ++result.flips;
        }
        if (st.unsat.empty()) {  // solved on the budget's last flip
            result.assignment = st.a;
            return result;
        }
    }
    return result;
}

}  // namespace trsat
