#pragma once

// Interaction profiles V and the scaled multipliers V^(k N^-beta) and
// W^_N(k) = V^(k N^-beta) - b0. Convolutions are always evaluated from the
// analytic (or quadrature-tabulated) transform at scaled arguments; V_N is
// never sampled in physical space.

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "nlsrate/error.hpp"
#include "nlsrate/grid.hpp"
#include "nlsrate/norms.hpp"
#include "nlsrate/ratefit.hpp"

namespace nlsrate {

namespace detail {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.resize(static_cast<std::size_t>(n));
    gl.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[static_cast<std::size_t>(i)] = -x;
        gl.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        gl.weights[static_cast<std::size_t>(i)] = w;
        gl.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return gl;
}

// exp(z) - 1 without cancellation for small |z|.
inline Complex expm1(Complex z) {
    const double ex = std::expm1(z.real());
    const double s = std::sin(0.5 * z.imag());
    return {ex * std::cos(z.imag()) - 2.0 * s * s, (ex + 1.0) * std::sin(z.imag())};
}

// Radial kernels K_d(z) - 1 with series near zero: cos z, J0(z), sin z / z.
inline double radial_kernel_minus_one(int dim, double z) {
    if (dim == 1) {
        const double s = std::sin(0.5 * z);
        return -2.0 * s * s;
    }
    const double z2 = z * z;
    if (dim == 2) {
        if (z < 0.1) return z2 * (-0.25 + z2 * (1.0 / 64 + z2 * (-1.0 / 2304 + z2 / 147456)));
        return std::cyl_bessel_j(0.0, z) - 1.0;
    }
    if (z < 0.1) return z2 * (-1.0 / 6 + z2 * (1.0 / 120 + z2 * (-1.0 / 5040 + z2 / 362880)));
    return std::sin(z) / z - 1.0;
}

inline double sphere_area(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * std::numbers::pi;
        default: return 4.0 * std::numbers::pi;
    }
}

// Compact smooth bump exp(-1 / (1 - r^2/R^2)) tabulated on Gauss-Legendre radii.
struct BumpTable {
    int dim;
    double radius;
    std::vector<double> r;
    std::vector<double> w;  // quadrature weight times radial measure times profile
    double mass;            // integral before normalization
    double first_moment;    // integral of |x| V before normalization

    BumpTable(int d, double R, int nodes) : dim(d), radius(R) {
        const auto gl = gauss_legendre(nodes);
        mass = 0.0;
        first_moment = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double ri = 0.5 * R * (gl.nodes[i] + 1.0);
            const double t = 1.0 - (ri * ri) / (R * R);
            const double v = t > 0.0 ? std::exp(-1.0 / t) : 0.0;
            const double wi = 0.5 * R * gl.weights[i] * sphere_area(d) * std::pow(ri, d - 1) * v;
            r.push_back(ri);
            w.push_back(wi);
            mass += wi;
            first_moment += wi * ri;
        }
    }
};

}  // namespace detail

class PotentialProfile {
public:
    enum class Kind { gaussian, shifted_gaussian, bump, delta };

    /// V(x) = b0 (2 pi sigma^2)^(-d/2) exp(-|x|^2 / 2 sigma^2).
    static PotentialProfile gaussian(int dim, double b0, double sigma) {
        check_dim(dim);
        if (!(sigma > 0.0)) throw PreconditionError("gaussian profile needs sigma > 0");
        PotentialProfile p(Kind::gaussian, "gaussian", dim, b0);
        p.sigma_ = sigma;
        p.even_ = true;
        const double d = dim;
        p.first_moment_ = std::abs(b0) * sigma * std::sqrt(2.0) * std::tgamma((d + 1) / 2) / std::tgamma(d / 2);
        return p;
    }

    /// Gaussian centred at shift * e_1; not even, so W_N vanishes only linearly at 0.
    static PotentialProfile shifted_gaussian(int dim, double b0, double sigma, double shift) {
        PotentialProfile p = gaussian(dim, b0, sigma);
        p.kind_ = Kind::shifted_gaussian;
        p.name_ = "shifted-gaussian";
        p.shift_ = shift;
        p.even_ = shift == 0.0;
        p.first_moment_ = std::abs(b0) * shifted_gaussian_abs_mean(dim, sigma, shift);
        return p;
    }

    /// Smooth compactly supported bump of radius R with transform from quadrature.
    static PotentialProfile bump(int dim, double b0, double radius, int nodes = 256) {
        check_dim(dim);
        if (!(radius > 0.0)) throw PreconditionError("bump profile needs radius > 0");
        PotentialProfile p(Kind::bump, "bump", dim, b0);
        p.radius_ = radius;
        p.even_ = true;
        p.bump_ = std::make_shared<const detail::BumpTable>(dim, radius, nodes);
        p.first_moment_ = std::abs(b0) * p.bump_->first_moment / p.bump_->mass;
        return p;
    }

    /// b0 times the Dirac delta: V^ == b0 at every argument.
    static PotentialProfile delta(int dim, double b0) {
        check_dim(dim);
        PotentialProfile p(Kind::delta, "delta", dim, b0);
        p.even_ = true;
        p.first_moment_ = 0.0;
        return p;
    }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    double b0() const { return b0_; }
    double sigma() const { return sigma_; }
    double shift() const { return shift_; }
    double radius() const { return radius_; }
    /// ||x V||_{L^1}
    double first_moment() const { return first_moment_; }
    bool even() const { return even_; }
    bool nonnegative() const { return b0_ > 0.0; }

    /// V^(u) - b0, free of cancellation near u = 0 and exactly zero at u = 0.
    Complex deviation(const Wavevector& u) const {
        const double u2 = norm2(u);
        if (u2 == 0.0) return 0.0;
        switch (kind_) {
            case Kind::gaussian: return b0_ * std::expm1(-0.5 * sigma_ * sigma_ * u2);
            case Kind::shifted_gaussian:
                return b0_ * detail::expm1(Complex(-0.5 * sigma_ * sigma_ * u2, -u[0] * shift_));
            case Kind::bump: {
                const double z = std::sqrt(u2);
                double acc = 0.0;
                for (std::size_t i = 0; i < bump_->r.size(); ++i)
                    acc += bump_->w[i] * detail::radial_kernel_minus_one(dim_, z * bump_->r[i]);
                return b0_ * acc / bump_->mass;
            }
            case Kind::delta: return 0.0;
        }
        return 0.0;
    }

    /// V^(u); equals b0 exactly at u = 0.
    Complex fourier(const Wavevector& u) const {
        if (kind_ == Kind::delta || norm2(u) == 0.0) return b0_;
        return b0_ + deviation(u);
    }

private:
    PotentialProfile(Kind kind, std::string name, int dim, double b0)
        : kind_(kind), name_(std::move(name)), dim_(dim), b0_(b0) {}

    static void check_dim(int dim) {
        if (dim < 1 || dim > 3) throw PreconditionError("profile dimension must be 1, 2 or 3");
    }

    // E|X + s e_1| for X ~ N(0, sigma^2 I_d).
    static double shifted_gaussian_abs_mean(int dim, double sigma, double s) {
        s = std::abs(s);
        if (s == 0.0) {
            const double d = dim;
            return sigma * std::sqrt(2.0) * std::tgamma((d + 1) / 2) / std::tgamma(d / 2);
        }
        const double nu = s / sigma;
        if (dim == 1)
            return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * nu * nu) +
                   s * std::erf(nu / std::numbers::sqrt2);
        if (dim == 3)
            return sigma * (std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * nu * nu) +
                            (nu + 1.0 / nu) * std::erf(nu / std::numbers::sqrt2));
        // d = 2: Rice distribution mean by quadrature of r^2/sigma^2 exp(-(r^2+s^2)/2sigma^2) I0(rs/sigma^2).
        const auto gl = detail::gauss_legendre(400);
        const double upper = s + 14.0 * sigma;
        double acc = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double r = 0.5 * upper * (gl.nodes[i] + 1.0);
            const double z = r * s / (sigma * sigma);
            // I0(z) e^{-z} stays bounded; fold the exponentials together.
            const double scaled_i0 = std::cyl_bessel_i(0.0, z) * std::exp(-z);
            const double density = r / (sigma * sigma) * std::exp(-(r - s) * (r - s) / (2 * sigma * sigma)) * scaled_i0;
            acc += 0.5 * upper * gl.weights[i] * r * density;
        }
        return acc;
    }

    Kind kind_;
    std::string name_;
    int dim_;
    double b0_;
    double sigma_ = 0.0;
    double shift_ = 0.0;
    double radius_ = 0.0;
    double first_moment_ = 0.0;
    bool even_ = true;
    std::shared_ptr<const detail::BumpTable> bump_;
};

inline void check_contraction(double N, double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw PreconditionError("beta = " + std::to_string(beta) + " is outside the legal interval (0, 1)");
    if (!(N >= 1.0)) throw PreconditionError("N must be >= 1, got " + std::to_string(N));
}

/// k -> V^(k N^-beta)
class ScaledMultiplier {
public:
    ScaledMultiplier(PotentialProfile profile, double N, double beta)
        : profile_(std::move(profile)), scale_(std::pow(N, -beta)) {
        check_contraction(N, beta);
    }
    Complex operator()(const Wavevector& k) const {
        return profile_.fourier({k[0] * scale_, k[1] * scale_, k[2] * scale_});
    }
    double scale() const { return scale_; }

private:
    PotentialProfile profile_;
    double scale_;
};

/// k -> W^_N(k) = V^(k N^-beta) - b0
class ScaledDeviationMultiplier {
public:
    ScaledDeviationMultiplier(PotentialProfile profile, double N, double beta)
        : profile_(std::move(profile)), N_(N), beta_(beta), scale_(std::pow(N, -beta)) {
        check_contraction(N, beta);
    }
    Complex operator()(const Wavevector& k) const {
        if (norm2(k) == 0.0) return 0.0;
        return profile_.deviation({k[0] * scale_, k[1] * scale_, k[2] * scale_});
    }
    /// N^-beta |k| ||xV||_1, the first-order Taylor bound.
    double linear_bound(const Wavevector& k) const {
        return scale_ * std::sqrt(norm2(k)) * profile_.first_moment();
    }
    const PotentialProfile& profile() const { return profile_; }
    double N() const { return N_; }
    double beta() const { return beta_; }
    double scale() const { return scale_; }

private:
    PotentialProfile profile_;
    double N_;
    double beta_;
    double scale_;
};

/// V_N * f
inline SpectralField convolve_scaled(SpectralField f, const PotentialProfile& profile, double N, double beta) {
    return apply_multiplier(std::move(f), ScaledMultiplier(profile, N, beta));
}

/// W_N * f; the zero mode of the result is exactly 0.
inline SpectralField convolve_deviation(SpectralField f, const PotentialProfile& profile, double N, double beta) {
    return apply_multiplier(std::move(f), ScaledDeviationMultiplier(profile, N, beta));
}

struct ConvolutionRateReport {
    double s;
    double Dsf;                        ///< ||D^s f||_2
    std::vector<RateSample> samples;   ///< (N, ||W_N * f|| / ||D^s f||)
    RateFit fit;
};

/// Measures the decay of ||W_N * f||_2 / ||D^s f||_2 over a dyadic N list.
inline ConvolutionRateReport measure_convolution_rate(const PotentialProfile& profile, const SpectralField& f,
                                                      double s, const std::vector<std::int64_t>& N_list,
                                                      double beta) {
    if (N_list.size() < 4)
        throw PreconditionError("measure_convolution_rate needs at least 4 values of N");
    if (!all_dyadic(N_list)) throw PreconditionError("measure_convolution_rate requires dyadic N values");
    if (!(s >= 0.0 && s <= 1.0)) throw PreconditionError("s must lie in [0, 1]");
    const double denom = homogeneous_norm(f, s);
    if (denom == 0.0) throw PreconditionError("measure_convolution_rate: f has vanishing D^s norm");

    ConvolutionRateReport rep{s, denom, {}, {}};
    for (auto N : N_list) {
        const ScaledDeviationMultiplier w(profile, static_cast<double>(N), beta);
        double acc = 0.0;
        for_each_mode(f.grid(), [&](std::size_t i, const Wavevector& k) { acc += std::norm(w(k) * f[i]); });
        rep.samples.push_back({static_cast<double>(N), std::sqrt(acc) / denom});
    }
    rep.fit = fit_rate(rep.samples);
    return rep;
}

struct PairingReport {
    double lhs;
    double rhs;
    bool pass;
};

/// |<W_N * f1, f2>| against ||xV||_1 N^-beta || |grad|^(1/2) f1 || || |grad|^(1/2) f2 ||.
inline PairingReport bilinear_pairing_bound_check(const SpectralField& f1, const SpectralField& f2,
                                                  const PotentialProfile& profile, double N, double beta) {
    require_same_grid(f1.grid(), f2.grid(), "bilinear_pairing_bound_check");
    const ScaledDeviationMultiplier w(profile, N, beta);
    Complex acc = 0.0;
    for_each_mode(f1.grid(), [&](std::size_t i, const Wavevector& k) { acc += w(k) * f1[i] * std::conj(f2[i]); });
    const double lhs = std::abs(acc);
    const double rhs =
        profile.first_moment() * w.scale() * homogeneous_norm(f1, 0.5) * homogeneous_norm(f2, 0.5);
    return {lhs, rhs, lhs <= rhs};
}

}  // namespace nlsrate
