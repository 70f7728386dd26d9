#pragma once

// Norms over whole trajectories.

#include <cmath>
#include <string>

#include "nlsrate/error.hpp"
#include "nlsrate/evolution.hpp"
#include "nlsrate/norms.hpp"

namespace nlsrate {

/// sup over shared snapshot times of ||phi_A(t) - phi_B(t)||_{H^1}
inline double trajectory_sup_h1_diff(const EvolutionRun& a, const EvolutionRun& b) {
    require_same_grid(a.spec.grid, b.spec.grid, "trajectory_sup_h1_diff");
    if (a.snapshots.size() != b.snapshots.size())
        throw PreconditionError("trajectory_sup_h1_diff: runs have " + std::to_string(a.snapshots.size()) +
                                " and " + std::to_string(b.snapshots.size()) + " snapshots");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        const auto& sa = a.snapshots[i];
        const auto& sb = b.snapshots[i];
        if (std::abs(sa.t - sb.t) > 1e-12 * std::max(1.0, std::abs(sa.t)))
            throw PreconditionError("trajectory_sup_h1_diff: mismatched time grids at snapshot " +
                                    std::to_string(i));
        worst = std::max(worst, h1_distance(sa.field, sb.field));
    }
    return worst;
}

/// Trapezoid in t of ||<grad> phi(t)||_{L^6}^2, square-rooted. A lone
/// snapshot gets weight dt.
inline double strichartz_diagnostic(const EvolutionRun& run) {
    const auto& s = run.snapshots;
    if (s.empty()) return 0.0;
    std::vector<double> v;
    v.reserve(s.size());
    for (const auto& snap : s) {
        const double n6 = lp_norm(transform_inverse(bessel_potential(snap.field, 1.0)), 6.0);
        v.push_back(n6 * n6);
    }
    if (s.size() == 1) return std::sqrt(run.spec.dt * v[0]);
    double acc = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) acc += 0.5 * (s[i].t - s[i - 1].t) * (v[i] + v[i - 1]);
    return std::sqrt(acc);
}

}  // namespace nlsrate
