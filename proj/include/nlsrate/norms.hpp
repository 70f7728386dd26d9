#pragma once

// Sobolev-type norms, computed in wavenumber space under the Parseval
// normalization of SpectralField.

#include <algorithm>
#include <cmath>
#include <complex>

#include "nlsrate/grid.hpp"

namespace nlsrate {

enum class NormKind { Hs, Ds, LtInfHx1, Lt2Lx6 };

struct NormReport {
    NormKind kind;
    double value;
    double s = 0.0;
    double t_begin = 0.0;
    double t_end = 0.0;
};

inline double l2_norm(const SpectralField& f) {
    double acc = 0.0;
    for (const auto& c : f.coefficients()) acc += std::norm(c);
    return std::sqrt(acc);
}

/// (sum (1+|k|^2)^s |c_k|^2)^(1/2)
inline double sobolev_norm(const SpectralField& f, double s) {
    double acc = 0.0;
    if (s == 0.0) return l2_norm(f);
    for_each_mode(f.grid(), [&](std::size_t i, const Wavevector& k) {
        acc += std::pow(1.0 + norm2(k), s) * std::norm(f[i]);
    });
    return std::sqrt(acc);
}

/// Weight |k|^s; the zero mode never contributes.
inline double homogeneous_norm(const SpectralField& f, double s) {
    double acc = 0.0;
    for_each_mode(f.grid(), [&](std::size_t i, const Wavevector& k) {
        const double k2 = norm2(k);
        if (k2 == 0.0) return;
        acc += std::pow(k2, s) * std::norm(f[i]);
    });
    return std::sqrt(acc);
}

/// <<grad>^s f, <grad>^s g>, antilinear in the second argument.
inline Complex sobolev_inner(const SpectralField& f, const SpectralField& g, double s) {
    require_same_grid(f.grid(), g.grid(), "sobolev_inner");
    Complex acc = 0.0;
    for_each_mode(f.grid(), [&](std::size_t i, const Wavevector& k) {
        acc += std::pow(1.0 + norm2(k), s) * f[i] * std::conj(g[i]);
    });
    return acc;
}

inline double h1_distance(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid(), b.grid(), "h1_distance");
    double acc = 0.0;
    for_each_mode(a.grid(), [&](std::size_t i, const Wavevector& k) {
        acc += (1.0 + norm2(k)) * std::norm(a[i] - b[i]);
    });
    return std::sqrt(acc);
}

/// Physical-grid L^p norm with cell-volume weights.
inline double lp_norm(const PhysicalField& u, double p) {
    const GridSpec& g = u.grid();
    double acc = 0.0;
    for (const auto& v : u.values()) acc += std::pow(std::abs(v), p);
    return std::pow(acc * g.volume() / static_cast<double>(g.size()), 1.0 / p);
}

inline double max_abs(const PhysicalField& u) {
    double m = 0.0;
    for (const auto& v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

/// <grad>^s applied as a multiplier.
inline SpectralField bessel_potential(SpectralField f, double s) {
    for_each_mode(f.grid(), [&](std::size_t i, const Wavevector& k) { f[i] *= std::pow(1.0 + norm2(k), s / 2); });
    return f;
}

}  // namespace nlsrate
