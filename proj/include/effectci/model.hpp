#pragma once

#include "effectci/types.hpp"

#include <vector>

namespace effectci {

// Covariance implied by the structural equations: sigma2 * (I-B)^{-1} (I-B)^{-T}.
CovMatrix covariance_of(const WeightedDag& dag);

// Mean-centers each column, then returns X^T X / n (denominator n, not n-1).
// Throws DegenerateDataError when the result is not positive definite.
CovMatrix empirical_cov(const Dataset& data);

// Conditional covariance sigma_{j,i|S} = sigma_{j,i} - sigma_{j,S} sigma_{S,S}^{-1} sigma_{S,i}.
// Requires i, j not in s; empty s returns sigma_{j,i}.
double conditional_cov(const CovMatrix& sigma, int j, int i, const std::vector<int>& s);

// k-th entry is the conditional variance of the k-th node in the order given
// all earlier nodes. All entries equal iff sigma lies in the equal-variance
// model for this order.
std::vector<double> equal_variance_residuals(const CovMatrix& sigma, const Ordering& order);

// Centered Gaussian log-likelihood -(n/2) (log det(2 pi S) + tr(S^{-1} S_hat))
// of a model covariance S against the empirical covariance S_hat.
double gauss_loglik(const CovMatrix& model_cov, const CovMatrix& emp_cov, int n);

// Log-likelihood of the unconstrained Gaussian MLE: -(n/2) (log det(2 pi S_hat) + d).
double gauss_mle_loglik(const CovMatrix& emp_cov, int n);

}  // namespace effectci
