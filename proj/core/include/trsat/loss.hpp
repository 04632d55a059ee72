#pragma once

#include <vector>

#include "trsat/cnf.hpp"

namespace trsat {

// l(x, e): identity for positive polarity, complement for negative.
double literal_value(double x, int polarity);

// Exponentially weighted mean; converges to max as tau grows. Stable via
// max subtraction.
double smoothmax(const std::vector<double>& values, double tau);

// Product over clauses of the smoothmax of member literal values.
double phi_approx(const std::vector<double>& x, const CnfFormula& f, double tau);

// -sum_j log(smoothmax of clause j's literal values), scores clamped at
// 1e-12 before the log.
double neg_log_loss(const std::vector<double>& x, const CnfFormula& f, double tau);

}  // namespace trsat
