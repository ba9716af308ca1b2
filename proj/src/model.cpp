#include "effectci/model.hpp"

#include "effectci/linalg.hpp"

#include <cmath>

namespace effectci {

namespace {

// (I-B)^{-1} = sum_{k=0}^{d-1} B^k; exact where B is nilpotent by acyclicity,
// and keeps structural zeros exact (no solver fill-in).
Eigen::MatrixXd neumann_inverse(const Eigen::MatrixXd& b) {
    const int d = static_cast<int>(b.rows());
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    for (int k = 1; k < d; ++k) {
        power = b * power;
        acc += power;
    }
    return acc;
}

}  // namespace

CovMatrix covariance_of(const WeightedDag& dag) {
    const Eigen::MatrixXd m = neumann_inverse(dag.b);
    Eigen::MatrixXd sigma = dag.sigma2 * (m * m.transpose());
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return CovMatrix::make(std::move(sigma));
}

CovMatrix empirical_cov(const Dataset& data) {
    Eigen::MatrixXd centered = data.x.rowwise() - data.x.colwise().mean();
    Eigen::MatrixXd sigma = (centered.transpose() * centered) / static_cast<double>(data.n);
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    try {
        return CovMatrix::make(std::move(sigma));
    } catch (const DegenerateDataError&) {
        throw DegenerateDataError(
            "empirical_cov: covariance is singular (too few samples or collinear columns)");
    }
}

double conditional_cov(const CovMatrix& sigma, int j, int i, const std::vector<int>& s) {
    if (j < 0 || j >= sigma.d || i < 0 || i >= sigma.d)
        throw Error("conditional_cov: node index out of range");
    for (int v : s)
        if (v == i || v == j) throw Error("conditional_cov: i and j must not be in S");
    if (s.empty()) return sigma.sigma(j, i);
    PrefixChol chol(sigma.sigma);
    try {
        for (int v : s) chol.extend(v);
    } catch (const ConditioningError&) {
        throw ConditioningError("conditional_cov: sigma_{S,S} is numerically singular");
    }
    return chol.cond_cov(j, i);
}

std::vector<double> equal_variance_residuals(const CovMatrix& sigma, const Ordering& order) {
    if (order.size() != sigma.d) throw Error("equal_variance_residuals: order size mismatch");
    std::vector<double> out;
    out.reserve(order.perm.size());
    PrefixChol chol(sigma.sigma);
    for (int v : order.perm) out.push_back(chol.extend(v));
    return out;
}

double gauss_loglik(const CovMatrix& model_cov, const CovMatrix& emp_cov, int n) {
    if (model_cov.d != emp_cov.d) throw Error("gauss_loglik: dimension mismatch");
    const int d = model_cov.d;
    Eigen::MatrixXd l;
    if (!detail::cholesky_lower(model_cov.sigma, l))
        throw ConditioningError("gauss_loglik: model covariance not positive definite");
    double logdet = 0.0;
    for (int k = 0; k < d; ++k) logdet += 2.0 * std::log(l(k, k));
    // tr(S^{-1} S_hat) = tr(L^{-1} S_hat L^{-T}) via two triangular solves.
    const Eigen::MatrixXd w = l.triangularView<Eigen::Lower>().solve(emp_cov.sigma);
    const Eigen::MatrixXd wt = w.transpose();
    const double trace = l.triangularView<Eigen::Lower>().solve(wt).trace();
    const double log2pi = std::log(2.0 * 3.14159265358979323846);
    return -0.5 * n * (d * log2pi + logdet + trace);
}

double gauss_mle_loglik(const CovMatrix& emp_cov, int n) {
    const int d = emp_cov.d;
    Eigen::MatrixXd l;
    if (!detail::cholesky_lower(emp_cov.sigma, l))
        throw DegenerateDataError("gauss_mle_loglik: covariance not positive definite");
    double logdet = 0.0;
    for (int k = 0; k < d; ++k) logdet += 2.0 * std::log(l(k, k));
    const double log2pi = std::log(2.0 * 3.14159265358979323846);
    return -0.5 * n * (d * log2pi + logdet + d);
}

}  // namespace effectci
