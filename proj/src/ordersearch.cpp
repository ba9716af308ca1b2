#include "effectci/ordersearch.hpp"

#include "effectci/linalg.hpp"
#include "effectci/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace effectci {

namespace {

struct Prefix {
    std::vector<int> nodes;
    std::uint64_t mask = 0;
    PrefixChol chol;
    double rss = 0.0;
    double bound = std::numeric_limits<double>::infinity();
    bool source_before_sink = false;
    double start_effect = std::numeric_limits<double>::quiet_NaN();

    explicit Prefix(const Eigen::MatrixXd& sigma) : chol(sigma) {}
};

struct Candidate {
    double pivot = 0.0;
    double bound = 0.0;
    double effect = std::numeric_limits<double>::quiet_NaN();
    bool keep = false;
    bool error = false;
};

struct PassResult {
    std::vector<Prefix> survivors;
    double max_loglik = -std::numeric_limits<double>::infinity();
    long expansions = 0;
};

// One breadth-first pass with a fixed reference loglik. At every level each
// frontier prefix is extended by every unused node; a child is kept only
// while 2 (ref - prefix_bound) <= crit. This can never prune an ordering
// whose full loglik passes the threshold: the bound is nonincreasing as
// nodes are appended, and it is computed through profile_loglik exactly as
// the full-order fit computes it.
PassResult run_pass(const Eigen::MatrixXd& sigma, int n, int d, int source, int sink,
                    double ref_loglik, double crit, bool collapse) {
    PassResult out;
    std::vector<Prefix> frontier;
    frontier.emplace_back(sigma);

    for (int level = 0; level < d; ++level) {
        // Flatten (parent, candidate node) pairs; children expand in
        // ascending node index.
        std::vector<std::pair<int, int>> tasks;
        tasks.reserve(frontier.size() * static_cast<std::size_t>(d - level));
        for (int p = 0; p < static_cast<int>(frontier.size()); ++p)
            for (int v = 0; v < d; ++v)
                if (!(frontier[static_cast<std::size_t>(p)].mask >> v & 1ULL))
                    tasks.emplace_back(p, v);

        std::vector<Candidate> cands(tasks.size());
        const long ntasks = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 16)
        for (long t = 0; t < ntasks; ++t) {
            Candidate& c = cands[static_cast<std::size_t>(t)];
            try {
                const auto [p, v] = tasks[static_cast<std::size_t>(t)];
                const Prefix& parent = frontier[static_cast<std::size_t>(p)];
                c.pivot = parent.chol.cond_var(v);
                c.bound = profile_loglik(parent.rss + c.pivot, n, d);
                c.keep = 2.0 * (ref_loglik - c.bound) <= crit;
                if (c.keep && v == source && !(parent.mask >> sink & 1ULL))
                    c.effect = parent.chol.cond_cov(sink, v) / c.pivot;
            } catch (const Error&) {
                c.error = true;
            }
        }
        out.expansions += ntasks;
        for (const Candidate& c : cands)
            if (c.error)
                throw ConditioningError("possible_orderings: singular block while conditioning");

        std::vector<Prefix> next;
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            if (!cands[t].keep) continue;
            const auto [p, v] = tasks[t];
            Prefix child = frontier[static_cast<std::size_t>(p)];
            child.chol.extend(v);
            child.nodes.push_back(v);
            child.mask |= 1ULL << v;
            child.rss += cands[t].pivot;
            child.bound = cands[t].bound;
            if (v == source) {
                child.source_before_sink = !(child.mask >> sink & 1ULL);
                child.start_effect = cands[t].effect;
            }
            next.push_back(std::move(child));
        }

        if (collapse && level + 1 < d) {
            // Among prefixes on the same node set that do not contain the
            // source yet, only the max-likelihood arrangement can matter
            // later: every completion adds identical terms to the rss.
            std::unordered_map<std::uint64_t, std::size_t> best;
            std::vector<bool> dead(next.size(), false);
            for (std::size_t t = 0; t < next.size(); ++t) {
                if (next[t].mask >> source & 1ULL) continue;
                auto [it, inserted] = best.try_emplace(next[t].mask, t);
                if (!inserted) {
                    if (next[t].rss < next[it->second].rss) {
                        dead[it->second] = true;
                        it->second = t;
                    } else {
                        dead[t] = true;
                    }
                }
            }
            std::vector<Prefix> kept;
            kept.reserve(next.size());
            for (std::size_t t = 0; t < next.size(); ++t)
                if (!dead[t]) kept.push_back(std::move(next[t]));
            next = std::move(kept);
        }
        frontier = std::move(next);
    }

    for (const Prefix& p : frontier) out.max_loglik = std::max(out.max_loglik, p.bound);
    out.survivors = std::move(frontier);
    return out;
}

}  // namespace

Ordering variance_sort_order(const CovMatrix& sigma_hat) {
    const int d = sigma_hat.d;
    PrefixChol chol(sigma_hat.sigma);
    std::vector<bool> used(static_cast<std::size_t>(d), false);
    std::vector<int> perm;
    perm.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        int best = -1;
        double best_var = std::numeric_limits<double>::infinity();
        for (int v = 0; v < d; ++v) {
            if (used[static_cast<std::size_t>(v)]) continue;
            const double var = chol.cond_var(v);
            if (var < best_var) {
                best_var = var;
                best = v;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        perm.push_back(best);
        chol.extend(best);
    }
    return Ordering::make(std::move(perm));
}

PlausibleOrderings search_orderings(const CovMatrix& sigma_hat, int n, int i, int j,
                                    double ref_loglik, double crit, const SearchOptions& opts) {
    const int d = sigma_hat.d;
    if (d > 63) throw Error("search_orderings: d too large for the prefix bitmask");
    if (i == j || i < 0 || i >= d || j < 0 || j >= d)
        throw Error("search_orderings: invalid node pair");

    PassResult pass =
        run_pass(sigma_hat.sigma, n, d, i, j, ref_loglik, crit, opts.collapse_before_source);
    long expansions = pass.expansions;
    double ref = ref_loglik;
    if (opts.update_reference && pass.max_loglik > ref) {
        // The initial reference undershoots the restricted-model maximum;
        // re-prune against the improved value. A second improvement is
        // impossible: the new maximum survives its own threshold.
        ref = pass.max_loglik;
        pass = run_pass(sigma_hat.sigma, n, d, i, j, ref, crit, opts.collapse_before_source);
        expansions += pass.expansions;
    }

    PlausibleOrderings plaus;
    plaus.l1_hat = ref;
    plaus.expansions = expansions;

    std::vector<const Prefix*> sorted;
    sorted.reserve(pass.survivors.size());
    for (const Prefix& p : pass.survivors) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const Prefix* a, const Prefix* b) {
        if (a->bound != b->bound) return a->bound > b->bound;
        return a->nodes < b->nodes;
    });

    for (const Prefix* p : sorted) {
        if (p->source_before_sink) {
            plaus.orders.push_back(Ordering::make(p->nodes));
            plaus.logliks.push_back(p->bound);
            plaus.start_effects.push_back(p->start_effect);
        } else {
            if (!plaus.zero_order) {
                plaus.zero_order = Ordering::make(p->nodes);
                plaus.zero_order_loglik = p->bound;
            }
            if (opts.keep_all_sink_first) {
                plaus.sink_first_orders.push_back(Ordering::make(p->nodes));
                plaus.sink_first_logliks.push_back(p->bound);
            }
        }
    }
    std::sort(plaus.start_effects.begin(), plaus.start_effects.end());
    plaus.start_effects.erase(std::unique(plaus.start_effects.begin(), plaus.start_effects.end()),
                              plaus.start_effects.end());
    return plaus;
}

PlausibleOrderings possible_orderings(const CovMatrix& sigma_hat, int n, int i, int j,
                                      double alpha, const SearchOptions& opts) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("possible_orderings: alpha must be in (0,1)");
    const OrderingFit init = fit_ordering(sigma_hat, variance_sort_order(sigma_hat), n);
    const double crit = chisq_quantile(sigma_hat.d, 1.0 - alpha);
    return search_orderings(sigma_hat, n, i, j, init.loglik, crit, opts);
}

}  // namespace effectci
