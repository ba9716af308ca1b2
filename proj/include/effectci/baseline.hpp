#pragma once

#include "effectci/region.hpp"
#include "effectci/rng.hpp"
#include "effectci/types.hpp"

namespace effectci {

// Point estimate of C(i->j) after structure learning by equal-variance
// likelihood search over orderings: exhaustive enumeration for d <= 7,
// greedy insertion plus pairwise-swap hill climbing beyond that.
double greedy_structure_effect(const Dataset& data, int i, int j);

// Naive nonparametric bootstrap: resample n rows with replacement, re-learn
// the structure and effect per replicate, percentile interval from the
// order statistics. Degenerate resamples are redrawn (up to 10 retries).
ConfidenceRegion bootstrap_ci(const Dataset& data, int i, int j, double alpha, int b_reps,
                              Rng rng);

}  // namespace effectci
