#include "effectci/tests.hpp"

#include "effectci/graphs.hpp"
#include "effectci/model.hpp"
#include "effectci/rng.hpp"
#include "effectci/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace effectci {

const char* method_name(Method m) {
    switch (m) {
        case Method::Lrt: return "lrt";
        case Method::Slrt: return "slrt";
        case Method::Bootstrap: return "bootstrap";
    }
    throw Error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "lrt") return Method::Lrt;
    if (name == "slrt") return Method::Slrt;
    if (name == "bootstrap") return Method::Bootstrap;
    throw Error("unknown method name: " + name);
}

void TestConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("TestConfig: alpha must be in (0,1)");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
        throw Error("TestConfig: split_ratio must be in (0,1)");
    if (step < 0.0) throw Error("TestConfig: step must be positive");
    if (max_steps < 1) throw Error("TestConfig: max_steps must be >= 1");
    if (method == Method::Bootstrap)
        throw Error("TestConfig: method must be lrt or slrt");
}

namespace {

struct BranchOutcome {
    double stat = std::numeric_limits<double>::infinity();
    double crit = 0.0;
    const Ordering* order = nullptr;
};

// Shared core of both tests: per-ordering statistics 2 (ref - loglik_c)
// against crit_full for source-first orderings, plus the unconstrained
// sink-first branch at psi = 0 against crit_zero. Accepts on the first
// passing ordering; on global rejection reports the branch closest to
// acceptance.
TestVerdict run_orderings_test(const CovMatrix& sigma_hat, int n, const PlausibleOrderings& plaus,
                               int i, int j, double psi, double ref, double crit_full,
                               double crit_zero, const SolverConfig& solver) {
    TestVerdict verdict;
    BranchOutcome best;
    best.crit = crit_full;
    for (std::size_t k = 0; k < plaus.orders.size(); ++k) {
        double loglik_c;
        try {
            loglik_c =
                fit_ordering_constrained(sigma_hat, n, plaus.orders[k], i, j, psi, solver).loglik;
        } catch (const SolverError&) {
            continue;  // rejects this ordering only
        }
        const double stat = 2.0 * (ref - loglik_c);
        if (stat <= crit_full) {
            verdict.accepted = true;
            verdict.stat = stat;
            verdict.crit = crit_full;
            verdict.order = plaus.orders[k];
            return verdict;
        }
        if (stat - crit_full < best.stat - best.crit) {
            best.stat = stat;
            best.crit = crit_full;
            best.order = &plaus.orders[k];
        }
    }
    if (psi == 0.0 && plaus.zero_order) {
        const double stat = 2.0 * (ref - plaus.zero_order_loglik);
        if (stat <= crit_zero) {
            verdict.accepted = true;
            verdict.stat = stat;
            verdict.crit = crit_zero;
            verdict.order = *plaus.zero_order;
            return verdict;
        }
        if (stat - crit_zero < best.stat - best.crit) {
            best.stat = stat;
            best.crit = crit_zero;
            best.order = &*plaus.zero_order;
        }
    }
    verdict.accepted = false;
    verdict.stat = best.stat;
    verdict.crit = best.crit;
    if (best.order) verdict.order = *best.order;
    return verdict;
}

}  // namespace

TestVerdict lrt_test_effect(const CovMatrix& sigma_hat, int n, const PlausibleOrderings& plaus,
                            int i, int j, double psi, double alpha, const SolverConfig& solver) {
    const int d = sigma_hat.d;
    const double crit_full = chisq_quantile(d, 1.0 - alpha);
    const double crit_zero = chisq_quantile(d - 1, 1.0 - alpha);
    return run_orderings_test(sigma_hat, n, plaus, i, j, psi, plaus.l1_hat, crit_full, crit_zero,
                              solver);
}

SplitData split_dataset(const Dataset& data, double split_ratio, std::uint64_t seed) {
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
        throw Error("split_dataset: split_ratio must be in (0,1)");
    const int n = data.n;
    const int n0 = static_cast<int>(std::ceil(split_ratio * n));
    if (n0 < data.d + 1 || n - n0 < data.d + 1)
        throw DegenerateDataError("split_dataset: a split half would have fewer than d+1 rows");
    Rng rng(seed);
    const std::vector<int> rows = rng.permutation(n);
    Eigen::MatrixXd x0(n0, data.d);
    Eigen::MatrixXd x1(n - n0, data.d);
    for (int r = 0; r < n0; ++r) x0.row(r) = data.x.row(rows[static_cast<std::size_t>(r)]);
    for (int r = n0; r < n; ++r) x1.row(r - n0) = data.x.row(rows[static_cast<std::size_t>(r)]);
    return SplitData{Dataset::make(std::move(x0), data.column_names),
                     Dataset::make(std::move(x1), data.column_names)};
}

CovMatrix restricted_mle_cov(const CovMatrix& sigma_hat, int n, double alpha) {
    // The pruning threshold only limits the search; the argmax is exact over
    // the survivors.
    const PlausibleOrderings plaus = possible_orderings(sigma_hat, n, 0, 1, alpha);
    const Ordering* best = nullptr;
    double best_loglik = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < plaus.orders.size(); ++k) {
        if (plaus.logliks[k] > best_loglik) {
            best_loglik = plaus.logliks[k];
            best = &plaus.orders[k];
        }
    }
    if (plaus.zero_order && plaus.zero_order_loglik > best_loglik) best = &*plaus.zero_order;
    const OrderingFit fit = fit_ordering(sigma_hat, *best, n);
    return covariance_of(WeightedDag::make(fit.b_hat, fit.sigma2_hat));
}

SlrtContext make_slrt_context(const Dataset& data, int i, int j, const TestConfig& cfg) {
    cfg.validate();
    const SplitData split = split_dataset(data, cfg.split_ratio, cfg.seed);
    SlrtContext ctx;
    ctx.sigma0 = empirical_cov(split.d0);
    ctx.n0 = split.d0.n;
    const CovMatrix sigma1 = empirical_cov(split.d1);
    ctx.tilde_sigma1 = restricted_mle_cov(sigma1, split.d1.n, cfg.alpha);
    ctx.numerator = gauss_loglik(ctx.tilde_sigma1, ctx.sigma0, ctx.n0);
    ctx.crit = -2.0 * std::log(cfg.alpha);
    SearchOptions opts;
    opts.update_reference = false;  // the numerator fixes the reference
    ctx.plaus0 = search_orderings(ctx.sigma0, ctx.n0, i, j, ctx.numerator, ctx.crit, opts);
    return ctx;
}

TestVerdict slrt_test_effect(const SlrtContext& ctx, int i, int j, double psi,
                             const SolverConfig& solver) {
    return run_orderings_test(ctx.sigma0, ctx.n0, ctx.plaus0, i, j, psi, ctx.numerator, ctx.crit,
                              ctx.crit, solver);
}

TestVerdict slrt_test_effect(const Dataset& data, const TestConfig& cfg,
                             const PlausibleOrderings& plaus_on_d0,
                             const CovMatrix& tilde_sigma1, int i, int j, double psi) {
    cfg.validate();
    const SplitData split = split_dataset(data, cfg.split_ratio, cfg.seed);
    const CovMatrix sigma0 = empirical_cov(split.d0);
    const double numerator = gauss_loglik(tilde_sigma1, sigma0, split.d0.n);
    const double crit = -2.0 * std::log(cfg.alpha);
    return run_orderings_test(sigma0, split.d0.n, plaus_on_d0, i, j, psi, numerator, crit, crit,
                              cfg.solver);
}

}  // namespace effectci
