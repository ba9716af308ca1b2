#include "effectci/types.hpp"

#include <algorithm>
#include <cmath>

namespace effectci {

namespace detail {

bool cholesky_lower(const Eigen::MatrixXd& m, Eigen::MatrixXd& l) {
    const int d = static_cast<int>(m.rows());
    const double tol = 1e-12 * m.diagonal().maxCoeff();
    l = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        double pivot = m(k, k);
        for (int t = 0; t < k; ++t) pivot -= l(k, t) * l(k, t);
        if (!(pivot > tol)) return false;
        l(k, k) = std::sqrt(pivot);
        for (int r = k + 1; r < d; ++r) {
            double v = m(r, k);
            for (int t = 0; t < k; ++t) v -= l(r, t) * l(k, t);
            l(r, k) = v / l(k, k);
        }
    }
    return true;
}

bool is_acyclic_support(const Eigen::MatrixXd& b) {
    // Kahn's algorithm on the support of b; edge i -> j iff b(j, i) != 0.
    const int d = static_cast<int>(b.rows());
    std::vector<int> indegree(static_cast<std::size_t>(d), 0);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            if (i != j && b(j, i) != 0.0) ++indegree[static_cast<std::size_t>(j)];
    std::vector<int> queue;
    for (int v = 0; v < d; ++v)
        if (indegree[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
    int removed = 0;
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        ++removed;
        for (int j = 0; j < d; ++j) {
            if (j != v && b(j, v) != 0.0 && --indegree[static_cast<std::size_t>(j)] == 0)
                queue.push_back(j);
        }
    }
    return removed == d;
}

}  // namespace detail

WeightedDag WeightedDag::make(Eigen::MatrixXd b, double sigma2) {
    if (b.rows() != b.cols() || b.rows() < 2)
        throw Error("WeightedDag: coefficient matrix must be square with d >= 2");
    if (!(sigma2 > 0.0)) throw Error("WeightedDag: sigma2 must be positive");
    if (!b.allFinite()) throw Error("WeightedDag: non-finite coefficient");
    for (int k = 0; k < b.rows(); ++k)
        if (b(k, k) != 0.0) throw Error("WeightedDag: diagonal of b must be zero");
    if (!detail::is_acyclic_support(b)) throw Error("WeightedDag: support of b is cyclic");
    WeightedDag dag;
    dag.d = static_cast<int>(b.rows());
    dag.b = std::move(b);
    dag.sigma2 = sigma2;
    return dag;
}

CovMatrix CovMatrix::make(Eigen::MatrixXd sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
        throw Error("CovMatrix: matrix must be square");
    if (!sigma.allFinite()) throw DegenerateDataError("CovMatrix: non-finite entry");
    const double scale = sigma.cwiseAbs().maxCoeff();
    const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1.0))
        throw Error("CovMatrix: matrix is not symmetric");
    Eigen::MatrixXd l;
    if (!detail::cholesky_lower(sigma, l))
        throw DegenerateDataError("CovMatrix: matrix is not positive definite");
    CovMatrix cov;
    cov.d = static_cast<int>(sigma.rows());
    cov.sigma = std::move(sigma);
    return cov;
}

Dataset Dataset::make(Eigen::MatrixXd x, std::optional<std::vector<std::string>> column_names) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (d < 1) throw DegenerateDataError("Dataset: needs at least one column");
    if (n < d + 1)
        throw DegenerateDataError("Dataset: need n >= d + 1 samples, got n = " +
                                  std::to_string(n) + ", d = " + std::to_string(d));
    if (!x.allFinite()) throw DegenerateDataError("Dataset: non-finite entry");
    if (column_names && static_cast<int>(column_names->size()) != d)
        throw Error("Dataset: column_names size does not match d");
    Dataset data;
    data.n = n;
    data.d = d;
    data.x = std::move(x);
    data.column_names = std::move(column_names);
    return data;
}

Ordering Ordering::make(std::vector<int> perm) {
    const int d = static_cast<int>(perm.size());
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    for (int v : perm) {
        if (v < 0 || v >= d || seen[static_cast<std::size_t>(v)])
            throw Error("Ordering: perm is not a permutation of {0..d-1}");
        seen[static_cast<std::size_t>(v)] = true;
    }
    Ordering o;
    o.perm = std::move(perm);
    return o;
}

int Ordering::position_of(int v) const {
    for (int k = 0; k < size(); ++k)
        if (perm[static_cast<std::size_t>(k)] == v) return k;
    throw Error("Ordering: node not present");
}

PrefixOrdering PrefixOrdering::make(std::vector<int> prefix, int d) {
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    for (int v : prefix) {
        if (v < 0 || v >= d || seen[static_cast<std::size_t>(v)])
            throw Error("PrefixOrdering: repeated or out-of-range entry");
        seen[static_cast<std::size_t>(v)] = true;
    }
    PrefixOrdering p;
    p.prefix = std::move(prefix);
    return p;
}

}  // namespace effectci
