#pragma once

#include "effectci/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace effectci {

// Growing Cholesky factor of a principal submatrix of a fixed covariance.
// Appending node v adds one row to the factor in O(m^2); the pivot of that
// row is exactly the conditional variance of v given the current prefix,
// and the back-solved row gives the regression coefficients of v on the
// prefix. This is the workhorse behind equal-variance residuals, per-ordering
// least squares and the prefix search.
class PrefixChol {
  public:
    explicit PrefixChol(const Eigen::MatrixXd& sigma)
        : s_(&sigma),
          d_(static_cast<int>(sigma.rows())),
          tol_(1e-12 * sigma.diagonal().maxCoeff()),
          l_(Eigen::MatrixXd::Zero(d_, d_)) {
        idx_.reserve(static_cast<std::size_t>(d_));
    }

    int size() const { return static_cast<int>(idx_.size()); }
    const std::vector<int>& prefix() const { return idx_; }

    // Conditional variance of v given the prefix; extends the factor by v.
    double extend(int v) {
        Eigen::VectorXd ell = solve_ell(v);
        const int m = size();
        const double pivot = (*s_)(v, v) - ell.squaredNorm();
        if (!(pivot > tol_))
            throw ConditioningError("PrefixChol: nonpositive pivot while conditioning");
        l_.row(m).head(m) = ell.transpose();
        l_(m, m) = std::sqrt(pivot);
        idx_.push_back(v);
        return pivot;
    }

    // Conditional variance of v given the prefix, without extending.
    double cond_var(int v) const {
        const double pivot = (*s_)(v, v) - solve_ell(v).squaredNorm();
        if (!(pivot > tol_))
            throw ConditioningError("PrefixChol: nonpositive conditional variance");
        return pivot;
    }

    // Conditional covariance of (a, b) given the prefix; a, b not in prefix.
    double cond_cov(int a, int b) const {
        return (*s_)(a, b) - solve_ell(a).dot(solve_ell(b));
    }

    // Regression coefficients of v on the prefix nodes (in prefix order).
    Eigen::VectorXd coeffs(int v) const {
        const int m = size();
        Eigen::VectorXd ell = solve_ell(v);
        // beta = L^{-T} ell
        for (int r = m - 1; r >= 0; --r) {
            double acc = ell(r);
            for (int t = r + 1; t < m; ++t) acc -= l_(t, r) * ell(t);
            ell(r) = acc / l_(r, r);
        }
        return ell;
    }

  private:
    // Forward solve L ell = sigma[prefix, v].
    Eigen::VectorXd solve_ell(int v) const {
        const int m = size();
        Eigen::VectorXd ell(m);
        for (int r = 0; r < m; ++r) {
            double acc = (*s_)(idx_[static_cast<std::size_t>(r)], v);
            for (int t = 0; t < r; ++t) acc -= l_(r, t) * ell(t);
            ell(r) = acc / l_(r, r);
        }
        return ell;
    }

    const Eigen::MatrixXd* s_;
    int d_;
    double tol_;
    std::vector<int> idx_;
    Eigen::MatrixXd l_;
};

}  // namespace effectci
