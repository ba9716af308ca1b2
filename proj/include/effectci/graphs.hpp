#pragma once

#include "effectci/rng.hpp"
#include "effectci/types.hpp"

#include <optional>
#include <vector>

namespace effectci {

enum class Density { Sparse, Dense };

// Variance of the Gaussian edge-weight draw in random_dag.
inline constexpr double kEdgeWeightVar = 0.1;

// Total causal effect (I-B)^{-1}_{j,i}: the sum over all directed paths from
// i to j of the products of edge weights. Exactly zero when no path exists.
double total_effect(const WeightedDag& dag, int i, int j);

// Total effect read off the covariance: sigma_{j,i|p(i)} / sigma_{i,i|p(i)}
// with p(i) the nodes preceding i in the order. Returns exactly zero when j
// precedes i.
double effect_from_cov(const CovMatrix& sigma, const Ordering& order, int i, int j);

// Random DAG: uniform causal order, N(beta_mean, kEdgeWeightVar) weights on
// the complete graph, edges kept with probability 0.9 (dense) / 0.5 (sparse),
// sigma2 = 1.
WeightedDag random_dag(int d, double beta_mean, Density density, Rng rng);

// Same construction, but the causal order is redrawn until `sink` precedes
// `source`, which forces the total effect source -> sink to be exactly zero.
WeightedDag random_dag_no_effect(int d, double beta_mean, Density density, int source, int sink,
                                 Rng rng);

// n i.i.d. rows X = (I-B)^{-1} eps, eps_k ~ N(0, sigma2), or per-node
// variances when supplied (robustness sweeps only).
Dataset sample_lsem(const WeightedDag& dag, int n, Rng rng,
                    const std::optional<std::vector<double>>& error_variances = std::nullopt);

}  // namespace effectci
