#include "effectci/graphs.hpp"

#include "effectci/linalg.hpp"

#include <cmath>

namespace effectci {

namespace {

WeightedDag dag_from_order(const std::vector<int>& order, double beta_mean, Density density,
                           Rng& rng) {
    const int d = static_cast<int>(order.size());
    const double keep_prob = density == Density::Dense ? 0.9 : 0.5;
    const double sd = std::sqrt(kEdgeWeightVar);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
    // Complete-graph weights along the order, then independent pruning.
    for (int a = 0; a < d; ++a) {
        for (int c = a + 1; c < d; ++c) {
            const int from = order[static_cast<std::size_t>(a)];
            const int to = order[static_cast<std::size_t>(c)];
            const double w = rng.normal(beta_mean, sd);
            if (rng.uniform01() < keep_prob) b(to, from) = w;
        }
    }
    return WeightedDag::make(std::move(b), 1.0);
}

}  // namespace

double total_effect(const WeightedDag& dag, int i, int j) {
    if (i == j) throw Error("total_effect: i and j must differ");
    if (i < 0 || i >= dag.d || j < 0 || j >= dag.d)
        throw Error("total_effect: node index out of range");
    // x = (I-B)^{-1} e_i accumulated through the nilpotent series; entries
    // without a directed path from i stay exactly zero.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dag.d);
    x(i) = 1.0;
    Eigen::VectorXd acc = x;
    for (int k = 1; k < dag.d; ++k) {
        x = dag.b * x;
        acc += x;
    }
    return acc(j);
}

double effect_from_cov(const CovMatrix& sigma, const Ordering& order, int i, int j) {
    if (i == j) throw Error("effect_from_cov: i and j must differ");
    if (order.size() != sigma.d) throw Error("effect_from_cov: order size mismatch");
    const int pos_i = order.position_of(i);
    if (order.position_of(j) < pos_i) return 0.0;
    PrefixChol chol(sigma.sigma);
    for (int k = 0; k < pos_i; ++k) chol.extend(order.perm[static_cast<std::size_t>(k)]);
    return chol.cond_cov(j, i) / chol.cond_var(i);
}

WeightedDag random_dag(int d, double beta_mean, Density density, Rng rng) {
    if (d < 2) throw Error("random_dag: d must be >= 2");
    const std::vector<int> order = rng.permutation(d);
    return dag_from_order(order, beta_mean, density, rng);
}

WeightedDag random_dag_no_effect(int d, double beta_mean, Density density, int source, int sink,
                                 Rng rng) {
    if (d < 2) throw Error("random_dag_no_effect: d must be >= 2");
    std::vector<int> order = rng.permutation(d);
    while (true) {
        int pos_source = -1;
        int pos_sink = -1;
        for (int k = 0; k < d; ++k) {
            if (order[static_cast<std::size_t>(k)] == source) pos_source = k;
            if (order[static_cast<std::size_t>(k)] == sink) pos_sink = k;
        }
        if (pos_sink < pos_source) break;
        order = rng.permutation(d);
    }
    return dag_from_order(order, beta_mean, density, rng);
}

Dataset sample_lsem(const WeightedDag& dag, int n, Rng rng,
                    const std::optional<std::vector<double>>& error_variances) {
    if (n < 1) throw Error("sample_lsem: n must be >= 1");
    const int d = dag.d;
    std::vector<double> sd(static_cast<std::size_t>(d), std::sqrt(dag.sigma2));
    if (error_variances) {
        if (static_cast<int>(error_variances->size()) != d)
            throw Error("sample_lsem: error_variances size mismatch");
        for (int k = 0; k < d; ++k) {
            const double v = (*error_variances)[static_cast<std::size_t>(k)];
            if (!(v > 0.0)) throw Error("sample_lsem: error variances must be positive");
            sd[static_cast<std::size_t>(k)] = std::sqrt(v);
        }
    }
    // Solve (I-B) x = eps row by row through the nilpotent series.
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    for (int k = 1; k < d; ++k) {
        power = dag.b * power;
        m += power;
    }
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd eps(d);
    for (int r = 0; r < n; ++r) {
        for (int k = 0; k < d; ++k) eps(k) = sd[static_cast<std::size_t>(k)] * rng.normal();
        x.row(r) = (m * eps).transpose();
    }
    return Dataset::make(std::move(x));
}

}  // namespace effectci
