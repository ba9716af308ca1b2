#pragma once

#include "effectci/types.hpp"

#include <utility>
#include <vector>

namespace effectci::reference {

// Serial cross-check implementations. They trade speed for independence from
// the optimized code paths: explicit path enumeration instead of the
// nilpotent solve, full d! enumeration instead of the pruned search, and
// quadrature instead of the incomplete-gamma quantile. Linked into the test
// and benchmark targets only.

// Sum over all directed paths from i to j of the products of edge weights,
// by depth-first enumeration over the support. Exponential; gated to d <= 8.
double path_sum_total_effect(const WeightedDag& dag, int i, int j);

// All d! orderings in lexicographic order.
std::vector<Ordering> all_orderings(int d);

// Full-enumeration survivor set: every ordering with
// 2 (ref_loglik - fit loglik) <= crit, with its loglik.
std::vector<std::pair<Ordering, double>> exhaustive_survivors(const CovMatrix& sigma_hat, int n,
                                                              double ref_loglik, double crit);

// Serial argmax of the per-ordering loglik over all d! orderings.
std::pair<Ordering, double> exhaustive_best_ordering(const CovMatrix& sigma_hat, int n);

// Chi-square quantile through an independent route: closed forms for df 1
// and 2, adaptive Simpson quadrature of the density plus bisection beyond.
double chisq_quantile_quadrature(int df, double p);

}  // namespace effectci::reference
