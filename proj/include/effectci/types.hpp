#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace effectci {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Empirical covariance not positive definite, non-finite input, n too small.
class DegenerateDataError : public Error {
  public:
    using Error::Error;
};

// Numerically singular block encountered while conditioning.
class ConditioningError : public Error {
  public:
    using Error::Error;
};

// Constrained optimizer did not converge; carries the best objective found
// so callers can fall back conservatively.
class SolverError : public Error {
  public:
    SolverError(const std::string& what, double best_loglik)
        : Error(what), best_loglik_(best_loglik) {}
    double best_loglik() const { return best_loglik_; }

  private:
    double best_loglik_;
};

// Region scan exceeded max_steps in one direction.
class ScanOverflowError : public Error {
  public:
    ScanOverflowError(const std::string& what, int direction)
        : Error(what), direction_(direction) {}
    // -1: unbounded to the left, +1: to the right.
    int direction() const { return direction_; }

  private:
    int direction_;
};

namespace detail {

// Lower Cholesky factor with the pivot rule used throughout: a pivot is
// accepted only if it exceeds 1e-12 times the largest diagonal entry.
// Returns false on failure (matrix not numerically positive definite).
bool cholesky_lower(const Eigen::MatrixXd& m, Eigen::MatrixXd& l);

bool is_acyclic_support(const Eigen::MatrixXd& b);

}  // namespace detail

// Edge-coefficient matrix with acyclic support plus a common error variance.
// b(j, i) is the direct effect of node i on node j.
struct WeightedDag {
    int d = 0;
    Eigen::MatrixXd b;
    double sigma2 = 1.0;

    static WeightedDag make(Eigen::MatrixXd b, double sigma2);
};

// Symmetric positive definite covariance matrix.
struct CovMatrix {
    int d = 0;
    Eigen::MatrixXd sigma;

    static CovMatrix make(Eigen::MatrixXd sigma);
};

// n x d sample matrix, one observation per row.
struct Dataset {
    int n = 0;
    int d = 0;
    Eigen::MatrixXd x;
    std::optional<std::vector<std::string>> column_names;

    static Dataset make(Eigen::MatrixXd x,
                        std::optional<std::vector<std::string>> column_names = std::nullopt);
};

// Permutation of {0, ..., d-1}; perm[k] is the k-th node in causal order.
struct Ordering {
    std::vector<int> perm;

    static Ordering make(std::vector<int> perm);

    int size() const { return static_cast<int>(perm.size()); }
    // Position of node v in the order.
    int position_of(int v) const;
    bool precedes(int a, int b) const { return position_of(a) < position_of(b); }
};

// Injective sequence over {0, ..., d-1}, a partial causal order.
struct PrefixOrdering {
    std::vector<int> prefix;

    static PrefixOrdering make(std::vector<int> prefix, int d);

    int size() const { return static_cast<int>(prefix.size()); }
};

}  // namespace effectci
