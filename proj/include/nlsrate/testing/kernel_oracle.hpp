#pragma once

// Brute-force reference for hierarchy norms on tiny 1D grids. The 2k
// variable kernels are materialized in physical space and the Bessel
// potential is applied along every variable by a naive O(n^2) DFT, so nothing
// here shares code with the FFT path or the one-particle algebra.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace nlsrate::testing {

using cplx = std::complex<double>;

/// 1D periodic samples with extent L.
struct TinyField {
    double L;
    std::vector<cplx> values;
};

inline int tiny_signed(std::size_t m, std::size_t n) {
    return m < n / 2 ? static_cast<int>(m) : static_cast<int>(m) - static_cast<int>(n);
}

/// Kernel with 2k variables, each on n points; row-major.
struct TinyKernel {
    std::size_t n;
    int vars;
    double L;
    std::vector<cplx> data;
};

/// gamma(x_1..x_k; y_1..y_k) = prod phi(x_i) conj(phi(y_i))
inline TinyKernel factorized_kernel(const TinyField& phi, int k) {
    const std::size_t n = phi.values.size();
    const int vars = 2 * k;
    std::size_t total = 1;
    for (int v = 0; v < vars; ++v) total *= n;
    TinyKernel K{n, vars, phi.L, std::vector<cplx>(total)};
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        cplx prod = 1.0;
        for (int v = vars - 1; v >= 0; --v) {
            const std::size_t j = rest % n;
            rest /= n;
            prod *= v < k ? phi.values[j] : std::conj(phi.values[j]);
        }
        K.data[idx] = prod;
    }
    return K;
}

/// Applies (1 - d^2/dx^2)^(alpha/2) along one variable with a naive DFT.
inline void bessel_along(TinyKernel& K, int var, double alpha) {
    const std::size_t n = K.n;
    std::size_t stride = 1;
    for (int v = K.vars - 1; v > var; --v) stride *= n;
    const std::size_t block = stride * n;
    std::vector<cplx> line(n), spec(n);
    for (std::size_t base = 0; base < K.data.size(); base += block)
        for (std::size_t off = 0; off < stride; ++off) {
            for (std::size_t j = 0; j < n; ++j) line[j] = K.data[base + off + j * stride];
            for (std::size_t m = 0; m < n; ++m) {
                cplx acc = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    acc += line[j] * std::polar(1.0, -2 * std::numbers::pi * double(m * j) / double(n));
                const double kk = 2 * std::numbers::pi / K.L * tiny_signed(m, n);
                spec[m] = acc * std::pow(1.0 + kk * kk, alpha / 2);
            }
            for (std::size_t j = 0; j < n; ++j) {
                cplx acc = 0.0;
                for (std::size_t m = 0; m < n; ++m)
                    acc += spec[m] * std::polar(1.0, 2 * std::numbers::pi * double(m * j) / double(n));
                K.data[base + off + j * stride] = acc / double(n);
            }
        }
}

inline void apply_S(TinyKernel& K, double alpha) {
    for (int v = 0; v < K.vars; ++v) bessel_along(K, v, alpha);
}

/// L^2 norm with cell weights (L/n) per variable.
inline double kernel_l2(const TinyKernel& K) {
    double acc = 0.0;
    for (const auto& v : K.data) acc += std::norm(v);
    return std::sqrt(acc * std::pow(K.L / double(K.n), K.vars));
}

/// ||S^(alpha,k) gamma^(k)||_{L^2} by brute force.
inline double brute_level_norm(const TinyField& phi, double alpha, int k) {
    TinyKernel K = factorized_kernel(phi, k);
    apply_S(K, alpha);
    return kernel_l2(K);
}

/// ||S^(1,k) (gamma_a^(k) - gamma_b^(k))||_{L^2} by brute force.
inline double brute_difference_norm(const TinyField& a, const TinyField& b, int k) {
    TinyKernel Ka = factorized_kernel(a, k);
    const TinyKernel Kb = factorized_kernel(b, k);
    for (std::size_t i = 0; i < Ka.data.size(); ++i) Ka.data[i] -= Kb.data[i];
    apply_S(Ka, 1.0);
    return kernel_l2(Ka);
}

}  // namespace nlsrate::testing
