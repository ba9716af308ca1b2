#include "effectci/reference.hpp"

#include "effectci/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace effectci::reference {

namespace {

double paths_from(const WeightedDag& dag, int node, int target) {
    if (node == target) return 1.0;
    double acc = 0.0;
    for (int next = 0; next < dag.d; ++next)
        if (dag.b(next, node) != 0.0) acc += dag.b(next, node) * paths_from(dag, next, target);
    return acc;
}

}  // namespace

double path_sum_total_effect(const WeightedDag& dag, int i, int j) {
    if (dag.d > 8) throw Error("path_sum_total_effect: enumeration gated to d <= 8");
    if (i == j) throw Error("path_sum_total_effect: i and j must differ");
    double acc = 0.0;
    for (int next = 0; next < dag.d; ++next)
        if (dag.b(next, i) != 0.0) acc += dag.b(next, i) * paths_from(dag, next, j);
    return acc;
}

std::vector<Ordering> all_orderings(int d) {
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Ordering> out;
    do {
        out.push_back(Ordering::make(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::vector<std::pair<Ordering, double>> exhaustive_survivors(const CovMatrix& sigma_hat, int n,
                                                              double ref_loglik, double crit) {
    std::vector<std::pair<Ordering, double>> out;
    for (const Ordering& order : all_orderings(sigma_hat.d)) {
        const double loglik = fit_ordering(sigma_hat, order, n).loglik;
        if (2.0 * (ref_loglik - loglik) <= crit) out.emplace_back(order, loglik);
    }
    return out;
}

std::pair<Ordering, double> exhaustive_best_ordering(const CovMatrix& sigma_hat, int n) {
    std::pair<Ordering, double> best{Ordering{}, -std::numeric_limits<double>::infinity()};
    for (const Ordering& order : all_orderings(sigma_hat.d)) {
        const double loglik = fit_ordering(sigma_hat, order, n).loglik;
        if (loglik > best.second) best = {order, loglik};
    }
    return best;
}

namespace {

double chisq_pdf(double x, int df) {
    const double a = 0.5 * df;
    if (x <= 0.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

double simpson(double lo, double hi, int df) {
    const double mid = 0.5 * (lo + hi);
    return (hi - lo) / 6.0 * (chisq_pdf(lo, df) + 4.0 * chisq_pdf(mid, df) + chisq_pdf(hi, df));
}

double adaptive_simpson(double lo, double hi, int df, double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double left = simpson(lo, mid, df);
    const double right = simpson(mid, hi, df);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(lo, mid, df, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(mid, hi, df, right, 0.5 * tol, depth - 1);
}

double chisq_cdf_quadrature(double x, int df) {
    if (x <= 0.0) return 0.0;
    if (df == 1) return std::erf(std::sqrt(0.5 * x));
    if (df == 2) return 1.0 - std::exp(-0.5 * x);
    return adaptive_simpson(0.0, x, df, simpson(0.0, x, df), 1e-13, 40);
}

}  // namespace

double chisq_quantile_quadrature(int df, double p) {
    if (df < 1) throw Error("chisq_quantile_quadrature: df must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw Error("chisq_quantile_quadrature: p must be in (0,1)");
    double hi = 1.0;
    while (chisq_cdf_quadrature(hi, df) < p) hi *= 2.0;
    double lo = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (chisq_cdf_quadrature(mid, df) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace effectci::reference
