#pragma once

#include "effectci/mle.hpp"
#include "effectci/types.hpp"

#include <optional>
#include <vector>

namespace effectci {

struct SearchOptions {
    // Collapse same-set prefixes that do not yet contain the source to their
    // max-likelihood arrangement (only the arrangement after the source
    // matters for the constrained tests). Disable to obtain the full
    // survivor set for cross-checks against exhaustive enumeration.
    bool collapse_before_source = true;
    // Re-run the pruning when the search finds a loglik above the initial
    // reference, so the reported reference is the true restricted-model
    // maximum. The split test fixes its reference externally and disables
    // this.
    bool update_reference = true;
    // Retain every surviving sink-before-source ordering instead of just the
    // max-likelihood one; used by the exhaustive-enumeration cross-checks.
    bool keep_all_sink_first = false;
};

// Output of the pruned ordering search.
struct PlausibleOrderings {
    // Survivors with the source before the sink, loglik nonincreasing.
    std::vector<Ordering> orders;
    std::vector<double> logliks;
    // Unrestricted-MLE effects of the surviving source-first orderings,
    // unique and ascending; the scan of the region construction starts here.
    std::vector<double> start_effects;
    // Reference log-likelihood the survivors were thresholded against.
    double l1_hat = 0.0;
    // Max-likelihood survivor with the sink before the source, if any.
    std::optional<Ordering> zero_order;
    double zero_order_loglik = 0.0;
    // Populated only under SearchOptions::keep_all_sink_first.
    std::vector<Ordering> sink_first_orders;
    std::vector<double> sink_first_logliks;
    // Diagnostics.
    long expansions = 0;
    int survivor_count() const {
        return static_cast<int>(orders.size()) + (zero_order ? 1 : 0);
    }
};

// Greedy conditional-variance sort: appends the node with the smallest
// conditional variance given the nodes chosen so far; ties break to the
// lowest node index.
Ordering variance_sort_order(const CovMatrix& sigma_hat);

// Plausible causal orderings for testing C(i->j): prunes every prefix whose
// partial maximum likelihood already fails 2 (L1 - loglik) <= chi2_{d,1-a},
// with L1 initialized from the variance-sort ordering and raised to the best
// full-order loglik found.
PlausibleOrderings possible_orderings(const CovMatrix& sigma_hat, int n, int i, int j,
                                      double alpha, const SearchOptions& opts = {});

// Same search against an explicit reference loglik and critical value;
// survivors are exactly the full orderings with 2 (ref - loglik) <= crit.
PlausibleOrderings search_orderings(const CovMatrix& sigma_hat, int n, int i, int j,
                                    double ref_loglik, double crit, const SearchOptions& opts = {});

}  // namespace effectci
