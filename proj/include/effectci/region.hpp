#pragma once

#include "effectci/tests.hpp"
#include "effectci/types.hpp"

#include <array>
#include <vector>

namespace effectci {

struct RegionDiagnostics {
    int survivor_count = 0;
    long evaluations = 0;  // effect tests run during the scan
    double wall_ms = 0.0;
};

// Finite union of disjoint closed intervals plus an isolated-zero flag.
struct ConfidenceRegion {
    std::vector<std::array<double, 2>> intervals;  // disjoint, ascending
    bool includes_zero = false;
    double alpha = 0.05;
    Method method = Method::Lrt;
    RegionDiagnostics diagnostics;

    bool contains(double psi) const;
    // Total width of the nonzero part.
    double width() const;
};

// Test-inversion confidence region for C(i->j): scans left and right from
// every unrestricted-MLE start effect in steps of s until rejection on both
// sides, records (leftbound + s/2, rightbound - s/2), then tests psi = 0
// over all surviving orderings including the sink-first one.
ConfidenceRegion confidence_region(const Dataset& data, int i, int j, const TestConfig& cfg);

}  // namespace effectci
