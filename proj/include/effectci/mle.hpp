#pragma once

#include "effectci/types.hpp"

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace effectci {

struct SolverConfig {
    // |total_effect(b_hat, i, j) - psi| must not exceed this.
    double constraint_tol = 1e-7;
    // Constrained loglik may exceed the unrestricted one by at most this.
    double nesting_slack = 1e-9;
    // Stop when the gradient sup-norm drops below grad_tol * (1 + |objective|).
    double grad_tol = 1e-9;
    int max_iterations = 500;
    int restarts = 3;
    double perturb_std = 0.1;
};

struct OrderingFit {
    Ordering order;
    double loglik = 0.0;
    Eigen::MatrixXd b_hat;
    double sigma2_hat = 0.0;
    // Total effect implied by b_hat for the requested target pair.
    std::optional<double> effect_hat;
};

// Gaussian log-likelihood profiled over the common variance:
// -(nd/2) log((2 pi / d) rss) - nd/2, with rss = tr((I-B)^T (I-B) sigma_hat).
// Strictly decreasing in rss.
double profile_loglik(double rss, int n, int d);

// Per-ordering maximum likelihood: d separable least squares problems with
// minimizer beta_k = sigma_{p(k),p(k)}^{-1} sigma_{p(k),k} and minimum
// rss = sum_k sigma_{k,k|p(k)}.
OrderingFit fit_ordering(const CovMatrix& sigma_hat, const Ordering& order, int n,
                         std::optional<std::pair<int, int>> target = std::nullopt);

// profile_loglik of the partial rss over the prefix only. Upper bound on the
// loglik of every completion: the unassigned nodes can only add positive
// conditional variances to the rss.
double prefix_bound(const CovMatrix& sigma_hat, const PrefixOrdering& prefix, int n, int d);

// Maximum likelihood under the fixed-effect constraint C(i->j) = psi for the
// given ordering (i must precede j). Rows outside p(j) u {j} \ p(i) u {i}
// keep the closed form; beta_{j,i} is eliminated through the submatrix power
// sum and the remaining coefficients are minimized by BFGS.
OrderingFit fit_ordering_constrained(const CovMatrix& sigma_hat, int n, const Ordering& order,
                                     int i, int j, double psi, const SolverConfig& cfg = {});

namespace detail {

// Reduced objective of the constrained problem (the full rss as a function
// of the free coefficients), exposed so the test suite can run independent
// finite-difference checks against the analytic gradient.
class ConstrainedProblem {
  public:
    ConstrainedProblem(const CovMatrix& sigma_hat, const Ordering& order, int i, int j,
                       double psi);

    int num_free() const { return num_free_; }
    Eigen::VectorXd unrestricted_start() const;
    double eval(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const;
    // Full coefficient matrix: closed-form rows, theta, and the eliminated
    // beta_{j,i}.
    Eigen::MatrixXd assemble(const Eigen::VectorXd& theta) const;

  private:
    struct JointRow {
        int node = 0;
        int k = 0;               // order position (= number of predecessors)
        Eigen::MatrixXd q;       // sigma over the predecessor block
        Eigen::VectorXd s;       // sigma between predecessors and node
        double diag = 0.0;       // sigma_{node,node}
        int theta_base = 0;      // flat offset of this row's free coefficients
    };

    Eigen::MatrixXd build_bs(const Eigen::VectorXd& theta) const;
    double derived_beta_ji(const std::vector<Eigen::MatrixXd>& powers) const;
    // theta slot of predecessor-position q within the row at position k.
    int free_offset(const JointRow& row, int q) const;

    std::vector<int> perm_;
    std::vector<int> pos_;  // pos_[node] = position in perm_
    int i_ = 0, j_ = 0, pos_i_ = 0, pos_j_ = 0, sz_ = 0;
    double psi_ = 0.0;
    double fixed_rss_ = 0.0;
    int num_free_ = 0;
    std::vector<JointRow> rows_;
    Eigen::MatrixXd closed_rows_;
    Eigen::MatrixXd unres_;  // unrestricted coefficients, for the start point
};

}  // namespace detail

}  // namespace effectci
