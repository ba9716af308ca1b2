#include "effectci/region.hpp"

#include "effectci/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

namespace effectci {

bool ConfidenceRegion::contains(double psi) const {
    if (psi == 0.0 && includes_zero) return true;
    for (const auto& iv : intervals)
        if (iv[0] <= psi && psi <= iv[1]) return true;
    return false;
}

double ConfidenceRegion::width() const {
    double w = 0.0;
    for (const auto& iv : intervals) w += iv[1] - iv[0];
    return w;
}

namespace {

std::vector<std::array<double, 2>> merge_intervals(std::vector<std::array<double, 2>> ivs) {
    std::sort(ivs.begin(), ivs.end());
    std::vector<std::array<double, 2>> out;
    for (const auto& iv : ivs) {
        if (!out.empty() && iv[0] <= out.back()[1] + 1e-12 * (1.0 + std::abs(out.back()[1])))
            out.back()[1] = std::max(out.back()[1], iv[1]);
        else
            out.push_back(iv);
    }
    return out;
}

}  // namespace

ConfidenceRegion confidence_region(const Dataset& data, int i, int j, const TestConfig& cfg) {
    cfg.validate();
    if (i == j || i < 0 || i >= data.d || j < 0 || j >= data.d)
        throw Error("confidence_region: invalid node pair");
    const auto t0 = std::chrono::steady_clock::now();

    ConfidenceRegion region;
    region.alpha = cfg.alpha;
    region.method = cfg.method;
    long evaluations = 0;

    const CovMatrix sigma_hat = empirical_cov(data);
    PlausibleOrderings plaus;
    SlrtContext slrt;
    std::function<bool(double)> accept;
    if (cfg.method == Method::Slrt) {
        slrt = make_slrt_context(data, i, j, cfg);
        plaus = slrt.plaus0;
        accept = [&](double psi) {
            ++evaluations;
            return slrt_test_effect(slrt, i, j, psi, cfg.solver).accepted;
        };
    } else {
        plaus = possible_orderings(sigma_hat, data.n, i, j, cfg.alpha);
        accept = [&](double psi) {
            ++evaluations;
            return lrt_test_effect(sigma_hat, data.n, plaus, i, j, psi, cfg.alpha, cfg.solver)
                .accepted;
        };
    }
    region.diagnostics.survivor_count = plaus.survivor_count();

    double max_abs_start = 0.0;
    for (double e : plaus.start_effects) max_abs_start = std::max(max_abs_start, std::abs(e));
    const double s = cfg.step > 0.0 ? cfg.step : 0.01 * std::max(1.0, max_abs_start);

    std::vector<double> starts = plaus.start_effects;  // ascending
    while (!starts.empty()) {
        const double v = starts.front();
        // Start effects are accepted by construction; a solver failure can
        // still reject one, so probe one step each way before giving up.
        double anchor = v;
        if (!accept(anchor)) {
            if (accept(v - s))
                anchor = v - s;
            else if (accept(v + s))
                anchor = v + s;
            else {
                starts.erase(starts.begin());
                continue;
            }
        }
        double leftbound = anchor;
        for (long k = 0;; ++k) {
            if (k >= cfg.max_steps)
                throw ScanOverflowError("confidence_region: scan did not terminate to the left",
                                        -1);
            leftbound -= s;
            if (!accept(leftbound)) break;
        }
        double rightbound = anchor;
        for (long k = 0;; ++k) {
            if (k >= cfg.max_steps)
                throw ScanOverflowError("confidence_region: scan did not terminate to the right",
                                        +1);
            rightbound += s;
            if (!accept(rightbound)) break;
        }
        region.intervals.push_back({leftbound + 0.5 * s, rightbound - 0.5 * s});
        std::vector<double> remaining;
        for (double e : starts)
            if (e >= rightbound && e != v) remaining.push_back(e);
        starts = std::move(remaining);
    }
    region.intervals = merge_intervals(std::move(region.intervals));

    const bool zero_accepted = accept(0.0);
    bool zero_in_interval = false;
    for (const auto& iv : region.intervals)
        if (iv[0] <= 0.0 && 0.0 <= iv[1]) zero_in_interval = true;
    region.includes_zero = zero_accepted || zero_in_interval;

    region.diagnostics.evaluations = evaluations;
    region.diagnostics.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return region;
}

}  // namespace effectci
