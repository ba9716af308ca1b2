#pragma once

#include "effectci/graphs.hpp"
#include "effectci/region.hpp"
#include "effectci/tests.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace effectci {

enum class EffectMode { TrueEffect, NoEffect };

struct ExperimentSpec {
    int d = 6;
    int n = 500;
    double beta_mean = 0.5;
    Density density = Density::Sparse;
    int reps = 200;
    double alpha = 0.05;
    std::vector<Method> methods = {Method::Lrt};
    EffectMode effect_mode = EffectMode::TrueEffect;
    // Degree of departure from equal error variances: per-node variances
    // drawn uniformly from [1 - 0.5 v, 1 + 0.5 v]. Zero keeps sigma2 = 1.
    double variance_spread = 0.0;
    std::uint64_t seed = 0;
    int bootstrap_reps = 500;
    double step = 0.0;  // 0 = per-region auto step
    double split_ratio = 0.5;

    void validate() const;
};

struct ReplicateRecord {
    int replicate = 0;
    Method method = Method::Lrt;
    double true_effect = 0.0;
    bool failed = false;
    bool covered = false;
    double width = 0.0;
    bool includes_zero = false;
    int interval_count = 0;
    int survivors = 0;
    long evaluations = 0;
    double wall_ms = 0.0;
};

struct MethodAggregate {
    Method method = Method::Lrt;
    int reps_ok = 0;
    double coverage = 0.0;
    double mean_width = 0.0;
    double zero_rate = 0.0;
    double mean_wall_ms = 0.0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<ReplicateRecord> records;  // replicate-major, method order as in spec
    std::vector<MethodAggregate> aggregates;
    int failures = 0;
};

// Runs the coverage experiment: per replicate draws a random DAG (redrawing
// the causal order so the sink precedes the source in no-effect mode),
// samples data, builds the regions per method, and records containment of
// the generating model's total effect, nonzero-part width, zero inclusion
// and timing. Replicates run in parallel with per-replicate substreams, so
// results do not depend on the thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Delimiter-separated output tables. Timing columns are optional because
// they are the only nondeterministic fields.
void write_replicate_table(const ExperimentResult& result, const std::string& path,
                           bool emit_timing);
void write_aggregate_table(const ExperimentResult& result, const std::string& path,
                           bool emit_timing);
// One Table-1-style line per method.
std::string summary_lines(const ExperimentResult& result);

}  // namespace effectci
