#pragma once

#include "effectci/mle.hpp"
#include "effectci/ordersearch.hpp"
#include "effectci/types.hpp"

#include <cstdint>
#include <optional>

namespace effectci {

enum class Method { Lrt, Slrt, Bootstrap };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct TestConfig {
    double alpha = 0.05;
    Method method = Method::Lrt;
    double split_ratio = 0.5;
    // Scan step; 0 selects 0.01 * max(1, |largest start effect|).
    double step = 0.0;
    std::uint64_t seed = 0;
    long max_steps = 1000000;
    SolverConfig solver;

    void validate() const;
};

struct TestVerdict {
    bool accepted = false;
    double stat = 0.0;
    double crit = 0.0;
    // Ordering that produced the acceptance.
    std::optional<Ordering> order;
};

// Per-ordering likelihood ratio test of C(i->j) = psi. Iterates the
// surviving orderings in decreasing-loglik order with the statistic
// 2 (L1 - constrained loglik) against chi2_{d,1-alpha}, short-circuiting on
// the first acceptance. For psi = 0 the max-likelihood sink-first ordering is
// additionally tested unconstrained against chi2_{d-1,1-alpha}. Solver
// failures reject the affected ordering only.
TestVerdict lrt_test_effect(const CovMatrix& sigma_hat, int n, const PlausibleOrderings& plaus,
                            int i, int j, double psi, double alpha,
                            const SolverConfig& solver = {});

// Deterministic random split into D0 (ceil(split_ratio * n) rows) and D1.
struct SplitData {
    Dataset d0;
    Dataset d1;
};
SplitData split_dataset(const Dataset& data, double split_ratio, std::uint64_t seed);

// Covariance implied by the best-ordering equal-variance fit; the
// restricted-model MLE of sigma. The pruned search is used for speed only,
// the argmax is exact (the maximizer always survives its own threshold).
CovMatrix restricted_mle_cov(const CovMatrix& sigma_hat, int n, double alpha = 0.05);

// Precomputed split-test state: D0 statistics, the D1 restricted MLE and the
// fixed numerator ell_0(tilde_sigma1), plus the D0 survivor set thresholded
// by the split rule 2 (ell_0(tilde_sigma1) - loglik) <= -2 log alpha (an
// ordering failing it rejects every psi, so dropping it is exact).
struct SlrtContext {
    CovMatrix sigma0;
    int n0 = 0;
    CovMatrix tilde_sigma1;
    double numerator = 0.0;
    double crit = 0.0;
    PlausibleOrderings plaus0;
};

SlrtContext make_slrt_context(const Dataset& data, int i, int j, const TestConfig& cfg);

// Split likelihood ratio test of C(i->j) = psi: statistic
// 2 (ell_0(tilde_sigma1) - sup_{M_psi(G)} ell_0) against -2 log alpha, the
// same critical value on the psi = 0 sink-first branch.
TestVerdict slrt_test_effect(const SlrtContext& ctx, int i, int j, double psi,
                             const SolverConfig& solver = {});

// Convenience overload recomputing the split from the dataset.
TestVerdict slrt_test_effect(const Dataset& data, const TestConfig& cfg,
                             const PlausibleOrderings& plaus_on_d0,
                             const CovMatrix& tilde_sigma1, int i, int j, double psi);

}  // namespace effectci
