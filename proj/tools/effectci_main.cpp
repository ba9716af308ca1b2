#include "effectci/baseline.hpp"
#include "effectci/io.hpp"
#include "effectci/region.hpp"
#include "effectci/sim.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 2;
constexpr int kExitScanOverflow = 3;

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("EFFECT_CI_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // runtime default
}

struct CiArgs {
    std::string data_path;
    int i = 0;
    int j = 0;
    double alpha = 0.05;
    double step = 0.0;
    std::string method = "lrt";
    double split_ratio = 0.5;
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string format = "json";
    int threads = 0;
};

int run_ci(const CiArgs& args) {
    effectci::set_num_threads(resolve_threads(args.threads));
    if (args.i == args.j) {
        std::cerr << "error: --i and --j must differ\n";
        return kExitDataError;
    }
    try {
        const effectci::Dataset data = effectci::read_dataset(args.data_path);
        if (args.i < 1 || args.i > data.d || args.j < 1 || args.j > data.d) {
            std::cerr << "error: node indices must be in 1.." << data.d << "\n";
            return kExitDataError;
        }
        effectci::TestConfig cfg;
        cfg.alpha = args.alpha;
        cfg.method = effectci::method_from_name(args.method);
        cfg.split_ratio = args.split_ratio;
        cfg.step = args.step;
        cfg.seed = args.seed;
        cfg.validate();
        const effectci::ConfidenceRegion region =
            effectci::confidence_region(data, args.i - 1, args.j - 1, cfg);
        const std::string payload = args.format == "text" ? effectci::region_to_text(region)
                                                          : effectci::region_to_json(region);
        if (args.out == "-" || args.out == "stdout") {
            std::cout << payload;
        } else {
            std::ofstream out(args.out);
            if (!out) {
                std::cerr << "error: cannot open output file " << args.out << "\n";
                return kExitDataError;
            }
            out << payload;
        }
        return kExitOk;
    } catch (const effectci::ScanOverflowError& e) {
        std::cerr << "error: " << e.what()
                  << (e.direction() < 0 ? " (unbounded left)" : " (unbounded right)") << "\n";
        return kExitScanOverflow;
    } catch (const effectci::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
}

struct SimulateArgs {
    int d = 6;
    int n = 500;
    double beta = 0.5;
    std::string density = "sparse";
    int reps = 200;
    double alpha = 0.05;
    std::string methods = "lrt";
    bool no_effect = false;
    double variance_spread = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    double step = 0.0;
    int bootstrap_reps = 500;
    double split_ratio = 0.5;
    int threads = 0;
    bool emit_timing = false;
};

int run_simulate(const SimulateArgs& args) {
    effectci::set_num_threads(resolve_threads(args.threads));
    try {
        effectci::ExperimentSpec spec;
        spec.d = args.d;
        spec.n = args.n;
        spec.beta_mean = args.beta;
        if (args.density == "sparse")
            spec.density = effectci::Density::Sparse;
        else if (args.density == "dense")
            spec.density = effectci::Density::Dense;
        else
            throw effectci::Error("density must be sparse or dense");
        spec.reps = args.reps;
        spec.alpha = args.alpha;
        spec.methods.clear();
        std::string token;
        std::istringstream ms(args.methods);
        while (std::getline(ms, token, ','))
            if (!token.empty()) spec.methods.push_back(effectci::method_from_name(token));
        spec.effect_mode =
            args.no_effect ? effectci::EffectMode::NoEffect : effectci::EffectMode::TrueEffect;
        spec.variance_spread = args.variance_spread;
        spec.seed = args.seed;
        spec.step = args.step;
        spec.bootstrap_reps = args.bootstrap_reps;
        spec.split_ratio = args.split_ratio;
        spec.validate();

        const effectci::ExperimentResult result = effectci::run_experiment(spec);
        std::filesystem::create_directories(args.out_dir);
        effectci::write_aggregate_table(result, args.out_dir + "/aggregate.csv",
                                        args.emit_timing);
        effectci::write_replicate_table(result, args.out_dir + "/replicates.csv",
                                        args.emit_timing);
        std::cout << effectci::summary_lines(result);
        if (result.failures > 0)
            std::cerr << "note: " << result.failures << " replicate runs failed and were excluded\n";
        return kExitOk;
    } catch (const effectci::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confidence regions for total causal effects in equal-variance linear SEMs"};
    app.require_subcommand(1);

    CiArgs ci;
    CLI::App* ci_cmd = app.add_subcommand("ci", "Confidence region for C(i->j) from a data file");
    ci_cmd->add_option("--data", ci.data_path, "Delimiter-separated numeric table")->required();
    ci_cmd->add_option("--i", ci.i, "Source variable (1-based column)")->required();
    ci_cmd->add_option("--j", ci.j, "Target variable (1-based column)")->required();
    ci_cmd->add_option("--alpha", ci.alpha, "Significance level")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12));
    ci_cmd->add_option("--step", ci.step, "Scan step (default: auto)");
    ci_cmd->add_option("--method", ci.method, "lrt or slrt")
        ->check(CLI::IsMember({"lrt", "slrt"}));
    ci_cmd->add_option("--split-ratio", ci.split_ratio, "Fraction of rows in D0 (slrt)");
    ci_cmd->add_option("--seed", ci.seed, "RNG seed for the slrt split");
    ci_cmd->add_option("--out", ci.out, "Output path or - for stdout");
    ci_cmd->add_option("--format", ci.format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));
    ci_cmd->add_option("--threads", ci.threads, "Worker threads (default: all)");

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Coverage experiment on random DAGs");
    sim_cmd->add_option("--d", sim.d, "Number of variables");
    sim_cmd->add_option("--n", sim.n, "Samples per replicate");
    sim_cmd->add_option("--beta", sim.beta, "Mean edge weight");
    sim_cmd->add_option("--density", sim.density, "sparse or dense")
        ->check(CLI::IsMember({"sparse", "dense"}));
    sim_cmd->add_option("--reps", sim.reps, "Number of replicates");
    sim_cmd->add_option("--alpha", sim.alpha, "Significance level")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12));
    sim_cmd->add_option("--methods", sim.methods, "Comma list of lrt,slrt,bootstrap");
    sim_cmd->add_flag("--no-effect", sim.no_effect, "Force C(1->2) = 0 in the generating DAG");
    sim_cmd->add_option("--variance-spread", sim.variance_spread,
                        "Departure v from equal variances, in [0, 1.8]");
    sim_cmd->add_option("--seed", sim.seed, "Master seed");
    sim_cmd->add_option("--out-dir", sim.out_dir, "Directory for the result tables");
    sim_cmd->add_option("--step", sim.step, "Scan step (default: auto)");
    sim_cmd->add_option("--bootstrap-reps", sim.bootstrap_reps, "Bootstrap resamples");
    sim_cmd->add_option("--split-ratio", sim.split_ratio, "Fraction of rows in D0 (slrt)");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (default: all)");
    sim_cmd->add_flag("--emit-timing", sim.emit_timing,
                      "Include wall-time columns (breaks bit-identical reruns)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitDataError;
    }

    if (ci_cmd->parsed()) return run_ci(ci);
    return run_simulate(sim);
}
