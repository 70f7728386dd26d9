#pragma once

// Norms of factorized marginal hierarchies gamma^(k) = |phi><phi|^{(x) k}.
// Every level-k quantity reduces to one-particle inner products; the 2k
// variable kernels are never formed.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nlsrate/error.hpp"
#include "nlsrate/grid.hpp"
#include "nlsrate/norms.hpp"

namespace nlsrate {

inline void check_level(int k) {
    if (k < 1) throw PreconditionError("hierarchy level must be >= 1, got " + std::to_string(k));
}

/// ||S^(alpha,k) gamma^(k)||_{L^2} = ||phi||_{H^alpha}^{2k}
inline double tensor_level_norm(const SpectralField& phi, double alpha, int k) {
    check_level(k);
    return std::pow(sobolev_norm(phi, alpha), 2 * k);
}

/// H^1-level difference of the two factorized kernels at level k.
///
/// With u = <grad> phi_N, v = <grad> phi, a = |u|^2, b = |v|^2, c = <u, v>,
/// the squared norm is a^{2k} + b^{2k} - 2|c|^{2k}, evaluated here as
/// (a^k - b^k)^2 + 2((ab)^k - |c|^{2k}) with ab - |c|^2 = a |v - (c*/a) u|^2
/// so that nearby states do not cancel catastrophically.
inline double tensor_difference_norm(const SpectralField& phi_N, const SpectralField& phi, int k) {
    check_level(k);
    require_same_grid(phi_N.grid(), phi.grid(), "tensor_difference_norm");
    const double a = std::pow(sobolev_norm(phi_N, 1.0), 2);
    const double b = std::pow(sobolev_norm(phi, 1.0), 2);
    if (a == 0.0 || b == 0.0) return std::pow(std::max(a, b), k);

    const Complex c = sobolev_inner(phi_N, phi, 1.0);
    const double a_minus_b = sobolev_inner(phi_N - phi, phi_N + phi, 1.0).real();

    // Residual of v after removing its projection onto u.
    SpectralField r = phi;
    r -= (std::conj(c) / a) * phi_N;
    const double gram = a * std::pow(sobolev_norm(r, 1.0), 2);  // ab - |c|^2 >= 0
    const double c2 = std::norm(c);

    double geo_ab = 0.0;   // sum_i a^i b^{k-1-i}
    double geo_gram = 0.0; // sum_i (ab)^i |c|^{2(k-1-i)}
    for (int i = 0; i < k; ++i) {
        geo_ab += std::pow(a, i) * std::pow(b, k - 1 - i);
        geo_gram += std::pow(a * b, i) * std::pow(c2, k - 1 - i);
    }
    const double diff = a_minus_b * geo_ab;
    double radicand = diff * diff + 2.0 * gram * geo_gram;
    const double scale = std::pow(a, 2 * k) + std::pow(b, 2 * k);
    if (radicand < 0.0 && radicand > -1e-12 * scale) radicand = 0.0;
    return std::sqrt(radicand);
}

struct BinomialReport {
    double lhs;
    double rhs;
    bool pass;
};

/// tensor_difference_norm <= 2k (3 C1)^{2k-1} ||phi_N - phi||_{H^1}, given both H^1 norms <= C1.
inline BinomialReport binomial_bound_check(const SpectralField& phi_N, const SpectralField& phi, int k, double C1) {
    check_level(k);
    const double nN = sobolev_norm(phi_N, 1.0);
    const double n = sobolev_norm(phi, 1.0);
    if (nN > C1 || n > C1)
        throw HypothesisViolation("binomial bound needs both H^1 norms <= C1 = " + std::to_string(C1) + ", got " +
                                  std::to_string(nN) + " and " + std::to_string(n));
    const double lhs = tensor_difference_norm(phi_N, phi, k);
    const double rhs = 2.0 * k * std::pow(3.0 * C1, 2 * k - 1) * h1_distance(phi_N, phi);
    return {lhs, rhs, lhs <= rhs};
}

/// sum_{k>=1} Z^{-k} ||phi||_{H^alpha}^{2k} = r / (1 - r), r = ||phi||^2 / Z
inline double master_norm_factorized(const SpectralField& phi, double alpha, double Z) {
    if (!(Z > 0.0)) throw PreconditionError("master norm weight Z must be positive");
    const double r = std::pow(sobolev_norm(phi, alpha), 2) / Z;
    if (r >= 1.0)
        throw DivergenceError("master norm diverges: ||phi||^2 / Z = " + std::to_string(r) + " >= 1");
    return r / (1.0 - r);
}

struct HierarchyDifference {
    double value;      ///< sum_{k <= k_used} Z^{-k} tensor_difference_norm
    int k_used;
    double tail_bound; ///< certified bound on the omitted levels
    double envelope;   ///< sum_{k >= 1} Z^{-k} 2k (3C)^{2k-1} ||phi_N - phi||_{H^1}
    double C;          ///< max of the two H^1 norms
};

/// Master-norm difference of two factorized hierarchies. Levels are added
/// until the geometric tail bound drops below 1e-12 of the partial sum, and
/// never fewer than k_max.
inline HierarchyDifference hierarchy_difference_master_norm(const SpectralField& phi_N, const SpectralField& phi,
                                                            double Z, int k_max = 1) {
    require_same_grid(phi_N.grid(), phi.grid(), "hierarchy_difference_master_norm");
    const double C = std::max(sobolev_norm(phi_N, 1.0), sobolev_norm(phi, 1.0));
    if (!(Z > 9.0 * C * C))
        throw DivergenceError("hierarchy difference needs Z > (3 C1)^2 = " + std::to_string(9.0 * C * C) +
                              ", got Z = " + std::to_string(Z));
    const double delta = h1_distance(phi_N, phi);
    HierarchyDifference out{0.0, 0, 0.0, 0.0, C};
    if (C == 0.0 || delta == 0.0) return out;

    const double rho = 9.0 * C * C / Z;
    const double lead = 2.0 * delta / (3.0 * C);  // term_k <= lead * k * rho^k
    out.envelope = lead * rho / ((1 - rho) * (1 - rho));

    auto tail = [&](int K) {
        // sum_{k > K} k rho^k
        const double rk = std::pow(rho, K + 1);
        return lead * rk * ((K + 1) - K * rho) / ((1 - rho) * (1 - rho));
    };

    double sum = 0.0;
    int k = 0;
    for (;;) {
        ++k;
        sum += std::pow(Z, -k) * tensor_difference_norm(phi_N, phi, k);
        const double t = tail(k);
        if (k >= k_max && t <= 1e-12 * sum) {
            out.tail_bound = t;
            break;
        }
        if (k > 100000) throw DivergenceError("hierarchy difference tail did not converge");
    }
    out.value = sum;
    out.k_used = k;
    return out;
}

/// Level-k norm of the mixture sum_i w_i |phi_i><phi_i|^{(x) k}:
/// (sum_{i,l} w_i w_l |<phi_i, phi_l>_{H^alpha}|^{2k})^{1/2}.
inline double mixture_level_norm(const std::vector<SpectralField>& states, const std::vector<double>& weights,
                                 double alpha, int k) {
    check_level(k);
    if (states.size() != weights.size() || states.empty())
        throw PreconditionError("mixture needs one weight per state");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw PreconditionError("mixture weights must be nonnegative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw PreconditionError("mixture weights must sum to 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t l = 0; l < states.size(); ++l)
            acc += weights[i] * weights[l] * std::pow(std::norm(sobolev_inner(states[i], states[l], alpha)), k);
    return std::sqrt(acc);
}

/// Master norm of a finite mixture, summed level by level to a 1e-12 relative tail.
inline double mixture_master_norm(const std::vector<SpectralField>& states, const std::vector<double>& weights,
                                  double alpha, double Z) {
    double C2 = 0.0;
    for (const auto& s : states) C2 = std::max(C2, std::pow(sobolev_norm(s, alpha), 2));
    const double r = C2 / Z;
    if (r >= 1.0) throw DivergenceError("mixture master norm diverges: max ||phi_i||^2 / Z >= 1");
    double sum = 0.0;
    for (int k = 1;; ++k) {
        sum += std::pow(Z, -k) * mixture_level_norm(states, weights, alpha, k);
        // level norm <= C2^k, so the tail is at most r^{k+1} / (1 - r)
        if (std::pow(r, k + 1) / (1 - r) <= 1e-12 * sum || sum == 0.0) break;
    }
    return sum;
}

}  // namespace nlsrate
