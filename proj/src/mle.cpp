#include "effectci/mle.hpp"

#include "effectci/graphs.hpp"
#include "effectci/linalg.hpp"
#include "effectci/rng.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <vector>

namespace effectci {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct BfgsOutcome {
    Eigen::VectorXd x;
    double f = 0.0;
    bool converged = false;
};

// Dense BFGS with backtracking Armijo line search. The inverse Hessian
// update is skipped when the curvature condition s'y > 0 fails.
BfgsOutcome bfgs_minimize(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& fn,
                          Eigen::VectorXd x0, const SolverConfig& cfg) {
    const int dim = static_cast<int>(x0.size());
    BfgsOutcome out;
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd g(dim);
    double f = fn(x, &g);
    bool stalled = false;
    for (int iter = 0; iter < cfg.max_iterations && !stalled; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= cfg.grad_tol * (1.0 + std::abs(f))) break;
        Eigen::VectorXd dir = -(h * g);
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            h.setIdentity();
            dir = -g;
            slope = g.dot(dir);
        }
        double step = 1.0;
        double f_new = 0.0;
        Eigen::VectorXd x_new;
        Eigen::VectorXd g_new(dim);
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * dir;
            f_new = fn(x_new, &g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            stalled = true;
            break;
        }
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = h * y;
            h -= rho * (s * hy.transpose() + hy * s.transpose());
            h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose());
        }
        x = std::move(x_new);
        g = g_new;
        f = f_new;
    }
    out.converged = g.lpNorm<Eigen::Infinity>() <= cfg.grad_tol * (1.0 + std::abs(f));
    out.x = std::move(x);
    out.f = f;
    return out;
}

std::uint64_t restart_seed(const Ordering& order, double psi) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    for (int v : order.perm) feed(static_cast<std::uint64_t>(v) + 1);
    std::uint64_t bits;
    std::memcpy(&bits, &psi, sizeof bits);
    feed(bits);
    return h;
}

}  // namespace

double profile_loglik(double rss, int n, int d) {
    if (!(rss > 0.0))
        throw DegenerateDataError("profile_loglik: residual sum must be positive");
    const double nd = static_cast<double>(n) * d;
    return -0.5 * nd * std::log(2.0 * kPi / d * rss) - 0.5 * nd;
}

OrderingFit fit_ordering(const CovMatrix& sigma_hat, const Ordering& order, int n,
                         std::optional<std::pair<int, int>> target) {
    const int d = sigma_hat.d;
    if (order.size() != d) throw Error("fit_ordering: order size mismatch");
    OrderingFit fit;
    fit.order = order;
    fit.b_hat = Eigen::MatrixXd::Zero(d, d);
    PrefixChol chol(sigma_hat.sigma);
    double rss = 0.0;
    for (int k = 0; k < d; ++k) {
        const int v = order.perm[static_cast<std::size_t>(k)];
        if (target && v == target->first && !order.precedes(target->second, target->first)) {
            // Effect read off at the moment the source is reached; equals the
            // path sum of the fitted coefficients.
            fit.effect_hat = k == 0 ? sigma_hat.sigma(target->second, v) / sigma_hat.sigma(v, v)
                                    : chol.cond_cov(target->second, v) / chol.cond_var(v);
        }
        if (k > 0) {
            const Eigen::VectorXd beta = chol.coeffs(v);
            for (int t = 0; t < k; ++t)
                fit.b_hat(v, order.perm[static_cast<std::size_t>(t)]) = beta(t);
        }
        rss += chol.extend(v);
    }
    if (target && order.precedes(target->second, target->first)) fit.effect_hat = 0.0;
    fit.loglik = profile_loglik(rss, n, d);
    fit.sigma2_hat = rss / d;
    return fit;
}

double prefix_bound(const CovMatrix& sigma_hat, const PrefixOrdering& prefix, int n, int d) {
    if (prefix.size() == 0) throw Error("prefix_bound: prefix must be nonempty");
    PrefixChol chol(sigma_hat.sigma);
    double rss = 0.0;
    for (int v : prefix.prefix) rss += chol.extend(v);
    return profile_loglik(rss, n, d);
}

namespace detail {

ConstrainedProblem::ConstrainedProblem(const CovMatrix& sigma_hat, const Ordering& order, int i,
                                       int j, double psi)
    : perm_(order.perm), i_(i), j_(j), psi_(psi) {
    const int d = sigma_hat.d;
    pos_.assign(static_cast<std::size_t>(d), -1);
    for (int k = 0; k < d; ++k) pos_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(k)])] = k;
    pos_i_ = pos_[static_cast<std::size_t>(i)];
    pos_j_ = pos_[static_cast<std::size_t>(j)];
    if (pos_i_ >= pos_j_)
        throw Error("fit_ordering_constrained: i must precede j in the order");
    sz_ = pos_j_ - pos_i_ + 1;
    closed_rows_ = Eigen::MatrixXd::Zero(d, d);
    unres_ = Eigen::MatrixXd::Zero(d, d);

    const Eigen::MatrixXd& s = sigma_hat.sigma;
    PrefixChol chol(s);
    int theta_base = 0;
    for (int k = 0; k < d; ++k) {
        const int v = perm_[static_cast<std::size_t>(k)];
        if (k > 0) {
            const Eigen::VectorXd beta = chol.coeffs(v);
            for (int t = 0; t < k; ++t)
                unres_(v, perm_[static_cast<std::size_t>(t)]) = beta(t);
        }
        const double condvar = chol.extend(v);
        if (k > pos_i_ && k <= pos_j_) {
            JointRow row;
            row.node = v;
            row.k = k;
            row.diag = s(v, v);
            row.s.resize(k);
            row.q.resize(k, k);
            for (int a = 0; a < k; ++a) {
                const int pa = perm_[static_cast<std::size_t>(a)];
                row.s(a) = s(pa, v);
                for (int b = 0; b < k; ++b) row.q(a, b) = s(pa, perm_[static_cast<std::size_t>(b)]);
            }
            row.theta_base = theta_base;
            theta_base += k - (k == pos_j_ ? 1 : 0);
            rows_.push_back(std::move(row));
        } else {
            fixed_rss_ += condvar;
            for (int t = 0; t < k; ++t) {
                const int p = perm_[static_cast<std::size_t>(t)];
                closed_rows_(v, p) = unres_(v, p);
            }
        }
    }
    num_free_ = theta_base;
}

int ConstrainedProblem::free_offset(const JointRow& row, int q) const {
    if (row.k == pos_j_ && q > pos_i_) return row.theta_base + q - 1;
    return row.theta_base + q;
}

Eigen::VectorXd ConstrainedProblem::unrestricted_start() const {
    Eigen::VectorXd theta(num_free_);
    for (const JointRow& row : rows_) {
        for (int q = 0; q < row.k; ++q) {
            if (row.k == pos_j_ && q == pos_i_) continue;
            theta(free_offset(row, q)) = unres_(row.node, perm_[static_cast<std::size_t>(q)]);
        }
    }
    return theta;
}

Eigen::MatrixXd ConstrainedProblem::build_bs(const Eigen::VectorXd& theta) const {
    // Local index u maps to order position pos_i_ + u. The (j, i) entry stays
    // zero: nothing read from the powers depends on it, because no length >= 2
    // path from i to j can traverse the edge i -> j itself.
    Eigen::MatrixXd bs = Eigen::MatrixXd::Zero(sz_, sz_);
    for (const JointRow& row : rows_) {
        const int la = row.k - pos_i_;
        for (int q = pos_i_; q < row.k; ++q) {
            if (row.k == pos_j_ && q == pos_i_) continue;
            bs(la, q - pos_i_) = theta(free_offset(row, q));
        }
    }
    return bs;
}

double ConstrainedProblem::derived_beta_ji(const std::vector<Eigen::MatrixXd>& powers) const {
    double acc = 0.0;
    for (int m = 2; m <= sz_ - 1; ++m) acc += powers[static_cast<std::size_t>(m)](sz_ - 1, 0);
    return psi_ - acc;
}

Eigen::MatrixXd ConstrainedProblem::assemble(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd b = closed_rows_;
    for (const JointRow& row : rows_) {
        for (int q = 0; q < row.k; ++q) {
            if (row.k == pos_j_ && q == pos_i_) continue;
            b(row.node, perm_[static_cast<std::size_t>(q)]) = theta(free_offset(row, q));
        }
    }
    const Eigen::MatrixXd bs = build_bs(theta);
    std::vector<Eigen::MatrixXd> powers(static_cast<std::size_t>(sz_));
    powers[0] = Eigen::MatrixXd::Identity(sz_, sz_);
    for (int m = 1; m <= sz_ - 1; ++m)
        powers[static_cast<std::size_t>(m)] = bs * powers[static_cast<std::size_t>(m - 1)];
    b(j_, i_) = derived_beta_ji(powers);
    return b;
}

double ConstrainedProblem::eval(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
    const Eigen::MatrixXd bs = build_bs(theta);
    std::vector<Eigen::MatrixXd> powers(static_cast<std::size_t>(sz_));
    powers[0] = Eigen::MatrixXd::Identity(sz_, sz_);
    for (int m = 1; m <= sz_ - 1; ++m)
        powers[static_cast<std::size_t>(m)] = bs * powers[static_cast<std::size_t>(m - 1)];
    const double beta_ji = derived_beta_ji(powers);

    double rss = fixed_rss_;
    Eigen::VectorXd grad_j_row;  // 2 (Q_j beta_j - s_j), kept for the chain term
    if (grad) grad->setZero(num_free_);
    for (const JointRow& row : rows_) {
        Eigen::VectorXd beta(row.k);
        for (int q = 0; q < row.k; ++q)
            beta(q) = (row.k == pos_j_ && q == pos_i_) ? beta_ji : theta(free_offset(row, q));
        const Eigen::VectorXd qb = row.q * beta;
        rss += row.diag - 2.0 * beta.dot(row.s) + beta.dot(qb);
        if (grad) {
            const Eigen::VectorXd row_grad = 2.0 * (qb - row.s);
            for (int q = 0; q < row.k; ++q) {
                if (row.k == pos_j_ && q == pos_i_) continue;
                (*grad)(free_offset(row, q)) += row_grad(q);
            }
            if (row.k == pos_j_) grad_j_row = row_grad;
        }
    }

    if (grad && sz_ >= 3) {
        // Chain rule through the eliminated coefficient: for free (a, b)
        // inside the submatrix, d beta_{j,i} / d beta_{a,b}
        //   = -sum_{w=1}^{sz-2} sum_{u+v=w} (B_s^u)_{j,a} (B_s^v)_{b,i}.
        const double r_j = grad_j_row(pos_i_);
        Eigen::MatrixXd conv = Eigen::MatrixXd::Zero(sz_, sz_);
        for (int w = 1; w <= sz_ - 2; ++w)
            for (int u = 0; u <= w; ++u)
                conv += powers[static_cast<std::size_t>(u)].row(sz_ - 1).transpose() *
                        powers[static_cast<std::size_t>(w - u)].col(0).transpose();
        for (const JointRow& row : rows_) {
            const int la = row.k - pos_i_;
            for (int q = pos_i_; q < row.k; ++q) {
                if (row.k == pos_j_ && q == pos_i_) continue;
                (*grad)(free_offset(row, q)) -= r_j * conv(la, q - pos_i_);
            }
        }
    }
    return rss;
}

}  // namespace detail

OrderingFit fit_ordering_constrained(const CovMatrix& sigma_hat, int n, const Ordering& order,
                                     int i, int j, double psi, const SolverConfig& cfg) {
    const int d = sigma_hat.d;
    if (order.size() != d) throw Error("fit_ordering_constrained: order size mismatch");
    detail::ConstrainedProblem problem(sigma_hat, order, i, j, psi);

    Eigen::VectorXd best_theta = problem.unrestricted_start();
    double best_rss;
    bool converged;
    if (problem.num_free() == 0) {
        best_rss = problem.eval(best_theta, nullptr);
        converged = true;
    } else {
        auto fn = [&problem](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
            return problem.eval(x, g);
        };
        const Eigen::VectorXd theta0 = best_theta;
        BfgsOutcome best = bfgs_minimize(fn, theta0, cfg);
        Rng rng(restart_seed(order, psi));
        for (int attempt = 1; attempt <= cfg.restarts && !best.converged; ++attempt) {
            Rng stream = rng.substream(static_cast<std::uint64_t>(attempt));
            Eigen::VectorXd start = theta0;
            for (int t = 0; t < start.size(); ++t) start(t) += cfg.perturb_std * stream.normal();
            BfgsOutcome retry = bfgs_minimize(fn, start, cfg);
            if (retry.converged || retry.f < best.f) best = std::move(retry);
        }
        best_theta = best.x;
        best_rss = best.f;
        converged = best.converged;
    }

    OrderingFit fit;
    fit.order = order;
    fit.b_hat = problem.assemble(best_theta);
    fit.loglik = profile_loglik(best_rss, n, d);
    fit.sigma2_hat = best_rss / d;
    const WeightedDag fitted = WeightedDag::make(fit.b_hat, fit.sigma2_hat);
    fit.effect_hat = total_effect(fitted, i, j);
    if (std::abs(*fit.effect_hat - psi) > cfg.constraint_tol)
        throw SolverError("fit_ordering_constrained: constraint residual exceeds tolerance",
                          fit.loglik);
    if (!converged)
        throw SolverError("fit_ordering_constrained: optimizer did not converge", fit.loglik);
    return fit;
}

}  // namespace effectci
