#include "effectci/baseline.hpp"

#include "effectci/graphs.hpp"
#include "effectci/linalg.hpp"
#include "effectci/mle.hpp"
#include "effectci/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace effectci {

namespace {

double partial_rss(const Eigen::MatrixXd& sigma, const std::vector<int>& order) {
    PrefixChol chol(sigma);
    double rss = 0.0;
    for (int v : order) rss += chol.extend(v);
    return rss;
}

Ordering exhaustive_best_order(const CovMatrix& sigma_hat) {
    const int d = sigma_hat.d;
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_rss = partial_rss(sigma_hat.sigma, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double rss = partial_rss(sigma_hat.sigma, perm);
        if (rss < best_rss) {
            best_rss = rss;
            best = perm;
        }
    }
    return Ordering::make(std::move(best));
}

Ordering greedy_best_order(const CovMatrix& sigma_hat) {
    const int d = sigma_hat.d;
    // Greedy insertion: grow the sequence by placing each remaining node at
    // the position that minimizes the partial rss.
    std::vector<int> order;
    std::vector<bool> used(static_cast<std::size_t>(d), false);
    for (int step = 0; step < d; ++step) {
        int best_node = -1;
        std::size_t best_pos = 0;
        double best_rss = std::numeric_limits<double>::infinity();
        for (int v = 0; v < d; ++v) {
            if (used[static_cast<std::size_t>(v)]) continue;
            for (std::size_t pos = 0; pos <= order.size(); ++pos) {
                std::vector<int> trial = order;
                trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), v);
                const double rss = partial_rss(sigma_hat.sigma, trial);
                if (rss < best_rss) {
                    best_rss = rss;
                    best_node = v;
                    best_pos = pos;
                }
            }
        }
        used[static_cast<std::size_t>(best_node)] = true;
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(best_pos), best_node);
    }
    // Pairwise-swap hill climbing until no swap improves the rss.
    double cur = partial_rss(sigma_hat.sigma, order);
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t a = 0; a < order.size(); ++a) {
            for (std::size_t b = a + 1; b < order.size(); ++b) {
                std::swap(order[a], order[b]);
                const double rss = partial_rss(sigma_hat.sigma, order);
                if (rss < cur - 1e-12 * std::abs(cur)) {
                    cur = rss;
                    improved = true;
                } else {
                    std::swap(order[a], order[b]);
                }
            }
        }
    }
    return Ordering::make(std::move(order));
}

}  // namespace

double greedy_structure_effect(const Dataset& data, int i, int j) {
    if (i == j || i < 0 || i >= data.d || j < 0 || j >= data.d)
        throw Error("greedy_structure_effect: invalid node pair");
    const CovMatrix sigma_hat = empirical_cov(data);
    const Ordering order =
        data.d <= 7 ? exhaustive_best_order(sigma_hat) : greedy_best_order(sigma_hat);
    return effect_from_cov(sigma_hat, order, i, j);
}

ConfidenceRegion bootstrap_ci(const Dataset& data, int i, int j, double alpha, int b_reps,
                              Rng rng) {
    if (b_reps < 100) throw Error("bootstrap_ci: b_reps must be >= 100");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bootstrap_ci: alpha must be in (0,1)");
    const auto t0 = std::chrono::steady_clock::now();
    const int n = data.n;
    std::vector<double> effects(static_cast<std::size_t>(b_reps));
    std::vector<bool> failed(static_cast<std::size_t>(b_reps), false);

#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < b_reps; ++b) {
        Rng stream = rng.substream(static_cast<std::uint64_t>(b));
        bool ok = false;
        for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
            Eigen::MatrixXd x(n, data.d);
            for (int r = 0; r < n; ++r)
                x.row(r) = data.x.row(static_cast<int>(stream.below(static_cast<std::uint64_t>(n))));
            try {
                effects[static_cast<std::size_t>(b)] =
                    greedy_structure_effect(Dataset::make(std::move(x)), i, j);
                ok = true;
            } catch (const Error&) {
                // degenerate resample, redraw
            }
        }
        if (!ok) failed[static_cast<std::size_t>(b)] = true;
    }
    for (bool f : failed)
        if (f)
            throw DegenerateDataError(
                "bootstrap_ci: a resample stayed degenerate after 10 retries");

    std::sort(effects.begin(), effects.end());
    auto order_stat = [&effects, b_reps](double p) {
        const int idx = std::clamp(static_cast<int>(std::ceil(p * b_reps)) - 1, 0, b_reps - 1);
        return effects[static_cast<std::size_t>(idx)];
    };
    const double lo = order_stat(0.5 * alpha);
    const double hi = order_stat(1.0 - 0.5 * alpha);

    ConfidenceRegion region;
    region.intervals = {{lo, hi}};
    region.includes_zero = lo <= 0.0 && 0.0 <= hi;
    region.alpha = alpha;
    region.method = Method::Bootstrap;
    region.diagnostics.survivor_count = 0;
    region.diagnostics.evaluations = b_reps;
    region.diagnostics.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return region;
}

}  // namespace effectci
