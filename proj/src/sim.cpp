#include "effectci/sim.hpp"

#include "effectci/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace effectci {

void ExperimentSpec::validate() const {
    if (d < 2) throw Error("ExperimentSpec: d must be >= 2");
    if (n < d + 1) throw Error("ExperimentSpec: n must be >= d + 1");
    if (reps < 1) throw Error("ExperimentSpec: reps must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("ExperimentSpec: alpha must be in (0,1)");
    if (methods.empty()) throw Error("ExperimentSpec: at least one method");
    if (variance_spread < 0.0 || variance_spread > 1.8)
        throw Error("ExperimentSpec: variance_spread must be in [0, 1.8]");
    if (bootstrap_reps < 100) throw Error("ExperimentSpec: bootstrap_reps must be >= 100");
    if (step < 0.0) throw Error("ExperimentSpec: step must be nonnegative");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
        throw Error("ExperimentSpec: split_ratio must be in (0,1)");
}

namespace {

ReplicateRecord run_one(const ExperimentSpec& spec, int rep, Method method,
                        const WeightedDag& dag, const Dataset& data, double true_effect,
                        std::uint64_t rep_seed) {
    ReplicateRecord rec;
    rec.replicate = rep;
    rec.method = method;
    rec.true_effect = true_effect;
    (void)dag;
    const auto t0 = std::chrono::steady_clock::now();
    ConfidenceRegion region;
    if (method == Method::Bootstrap) {
        region = bootstrap_ci(data, 0, 1, spec.alpha, spec.bootstrap_reps,
                              Rng(rep_seed).substream(3));
    } else {
        TestConfig cfg;
        cfg.alpha = spec.alpha;
        cfg.method = method;
        cfg.split_ratio = spec.split_ratio;
        cfg.step = spec.step;
        cfg.seed = Rng(rep_seed).substream(4).seed();
        region = confidence_region(data, 0, 1, cfg);
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rec.covered = region.contains(true_effect);
    rec.width = region.width();
    rec.includes_zero = region.includes_zero;
    rec.interval_count = static_cast<int>(region.intervals.size());
    rec.survivors = region.diagnostics.survivor_count;
    rec.evaluations = region.diagnostics.evaluations;
    return rec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const int m = static_cast<int>(spec.methods.size());
    ExperimentResult result;
    result.spec = spec;
    result.records.resize(static_cast<std::size_t>(spec.reps * m));

    const Rng master(spec.seed);
#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < spec.reps; ++rep) {
        const Rng rep_rng = master.substream(static_cast<std::uint64_t>(rep));
        try {
            WeightedDag dag =
                spec.effect_mode == EffectMode::NoEffect
                    ? random_dag_no_effect(spec.d, spec.beta_mean, spec.density, 0, 1,
                                           rep_rng.substream(0))
                    : random_dag(spec.d, spec.beta_mean, spec.density, rep_rng.substream(0));
            const double true_effect = total_effect(dag, 0, 1);
            std::optional<std::vector<double>> variances;
            if (spec.variance_spread > 0.0) {
                Rng vr = rep_rng.substream(2);
                std::vector<double> v(static_cast<std::size_t>(spec.d));
                for (double& x : v)
                    x = vr.uniform(1.0 - 0.5 * spec.variance_spread,
                                   1.0 + 0.5 * spec.variance_spread);
                variances = std::move(v);
            }
            Dataset data = sample_lsem(dag, spec.n, rep_rng.substream(1), variances);
            for (int mi = 0; mi < m; ++mi) {
                ReplicateRecord& rec = result.records[static_cast<std::size_t>(rep * m + mi)];
                try {
                    rec = run_one(spec, rep, spec.methods[static_cast<std::size_t>(mi)], dag, data,
                                  true_effect, rep_rng.seed());
                } catch (const Error&) {
                    rec.replicate = rep;
                    rec.method = spec.methods[static_cast<std::size_t>(mi)];
                    rec.true_effect = true_effect;
                    rec.failed = true;
                }
            }
        } catch (const Error&) {
            for (int mi = 0; mi < m; ++mi) {
                ReplicateRecord& rec = result.records[static_cast<std::size_t>(rep * m + mi)];
                rec.replicate = rep;
                rec.method = spec.methods[static_cast<std::size_t>(mi)];
                rec.failed = true;
            }
        }
    }

    int failures = 0;
    for (const ReplicateRecord& rec : result.records)
        if (rec.failed) ++failures;
    result.failures = failures;
    if (failures * 100 >= spec.reps * m)
        throw Error("run_experiment: more than 1% of replicates failed (" +
                    std::to_string(failures) + " of " + std::to_string(spec.reps * m) + ")");

    for (Method method : spec.methods) {
        MethodAggregate agg;
        agg.method = method;
        long covered = 0, zero = 0;
        double width_sum = 0.0, wall_sum = 0.0;
        for (const ReplicateRecord& rec : result.records) {
            if (rec.method != method || rec.failed) continue;
            ++agg.reps_ok;
            covered += rec.covered ? 1 : 0;
            zero += rec.includes_zero ? 1 : 0;
            width_sum += rec.width;
            wall_sum += rec.wall_ms;
        }
        if (agg.reps_ok > 0) {
            agg.coverage = static_cast<double>(covered) / agg.reps_ok;
            agg.zero_rate = static_cast<double>(zero) / agg.reps_ok;
            agg.mean_width = width_sum / agg.reps_ok;
            agg.mean_wall_ms = wall_sum / agg.reps_ok;
        }
        result.aggregates.push_back(agg);
    }
    return result;
}

namespace {

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string spec_header(const ExperimentSpec& spec) {
    std::ostringstream os;
    os << "# effectci-sim v1: d=" << spec.d << " n=" << spec.n << " beta=" << spec.beta_mean
       << " density=" << (spec.density == Density::Dense ? "dense" : "sparse")
       << " reps=" << spec.reps << " alpha=" << spec.alpha
       << " mode=" << (spec.effect_mode == EffectMode::NoEffect ? "no_effect" : "true_effect")
       << " variance_spread=" << spec.variance_spread << " seed=" << spec.seed << "\n";
    return os.str();
}

}  // namespace

void write_replicate_table(const ExperimentResult& result, const std::string& path,
                           bool emit_timing) {
    std::ofstream out(path);
    if (!out) throw Error("write_replicate_table: cannot open " + path);
    out << spec_header(result.spec);
    out << "replicate,method,true_effect,failed,covered,width,includes_zero,interval_count,"
           "survivors,evaluations";
    if (emit_timing) out << ",wall_ms";
    out << "\n";
    for (const ReplicateRecord& rec : result.records) {
        out << rec.replicate << ',' << method_name(rec.method) << ','
            << format_double(rec.true_effect) << ',' << (rec.failed ? 1 : 0) << ','
            << (rec.covered ? 1 : 0) << ',' << format_double(rec.width) << ','
            << (rec.includes_zero ? 1 : 0) << ',' << rec.interval_count << ',' << rec.survivors
            << ',' << rec.evaluations;
        if (emit_timing) out << ',' << format_double(rec.wall_ms);
        out << "\n";
    }
}

void write_aggregate_table(const ExperimentResult& result, const std::string& path,
                           bool emit_timing) {
    std::ofstream out(path);
    if (!out) throw Error("write_aggregate_table: cannot open " + path);
    out << spec_header(result.spec);
    out << "method,reps_ok,coverage,mean_width,zero_rate";
    if (emit_timing) out << ",mean_wall_ms";
    out << "\n";
    for (const MethodAggregate& agg : result.aggregates) {
        out << method_name(agg.method) << ',' << agg.reps_ok << ',' << format_double(agg.coverage)
            << ',' << format_double(agg.mean_width) << ',' << format_double(agg.zero_rate);
        if (emit_timing) out << ',' << format_double(agg.mean_wall_ms);
        out << "\n";
    }
}

std::string summary_lines(const ExperimentResult& result) {
    std::ostringstream os;
    for (const MethodAggregate& agg : result.aggregates) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%-9s reps=%-4d coverage=%.3f mean_width=%.4f zero_rate=%.3f "
                      "mean_wall_ms=%.1f\n",
                      method_name(agg.method), agg.reps_ok, agg.coverage, agg.mean_width,
                      agg.zero_rate, agg.mean_wall_ms);
        os << buf;
    }
    return os.str();
}

}  // namespace effectci
