#include "trsat/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trsat {

double literal_value(double x, int polarity) {
    if (polarity != 1 && polarity != -1) throw Error("literal_value: polarity must be +1 or -1");
    return polarity > 0 ? x : 1.0 - x;
}

double smoothmax(const std::vector<double>& values, double tau) {
    if (values.empty()) throw Error("smoothmax: empty input");
    if (tau <= 0.0) throw Error("smoothmax: tau must be positive");
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (!std::isfinite(v)) throw Error("smoothmax: non-finite input");
        mx = std::max(mx, tau * v);
    }
    double num = 0.0, den = 0.0;
    for (double v : values) {
        double w = std::exp(tau * v - mx);
        num += v * w;
        den += w;
    }
    return num / den;
}

static std::vector<double> clause_literal_values(const std::vector<double>& x, const Clause& c) {
    std::vector<double> lv;
    lv.reserve(c.literals.size());
    for (const Literal& l : c.literals) lv.push_back(literal_value(x[l.variable - 1], l.polarity));
    return lv;
}

static void check_length(const std::vector<double>& x, const CnfFormula& f) {
    if (static_cast<int>(x.size()) != f.num_variables)
        throw Error("loss: assignment length does not match variable count");
}

double phi_approx(const std::vector<double>& x, const CnfFormula& f, double tau) {
    check_length(x, f);
    double p = 1.0;
    for (const Clause& c : f.clauses) p *= smoothmax(clause_literal_values(x, c), tau);
    return p;
}

double neg_log_loss(const std::vector<double>& x, const CnfFormula& f, double tau) {
    check_length(x, f);
    double loss = 0.0;
    for (const Clause& c : f.clauses) {
        double s = smoothmax(clause_literal_values(x, c), tau);
        loss -= std::log(std::max(s, 1e-12));
    }
    if (!std::isfinite(loss)) throw Error("neg_log_loss: non-finite loss");
    return loss;
}

}  // namespace trsat
