#pragma once

// Space-time resonance witness. The datum f has Fourier support on two thin
// slabs in xi_1,
//
//     low:  (0, a)            amplitude N^(beta/2)
//     high: (M, M + a)        amplitude N^(-beta (q - 1/2))
//
// with M = N^beta, a = N^-beta, times the unit interval (0, 1) on every
// transverse axis. The forcing
//
//     F(t) = int_0^t e^{i(t-s) Laplace} [(W_N * |phi(s)|^2) phi(s)] ds,  phi(s) = e^{is Laplace} f,
//
// is evaluated in the interaction picture by composite trapezoid quadrature.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nlsrate/error.hpp"
#include "nlsrate/fft.hpp"
#include "nlsrate/grid.hpp"
#include "nlsrate/norms.hpp"
#include "nlsrate/potential.hpp"
#include "nlsrate/ratefit.hpp"

namespace nlsrate {

enum class WitnessVariant { resonant, ablated };

inline const char* to_string(WitnessVariant v) { return v == WitnessVariant::resonant ? "resonant" : "ablated"; }

struct Interval {
    double lo;
    double hi;
    bool contains(double x, double tol) const { return x > lo + tol && x < hi - tol; }
};

struct WitnessGridOptions {
    int dim = 3;
    int modes_per_bump = 4;
    int transverse_modes = 32;
    double transverse_spacing = 0.125;  ///< transverse slab (0, 1) holds 7 modes
};

namespace detail {

inline int fft_friendly(int n) {
    for (;; n += 2) {
        int r = n;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return n;
    }
}

}  // namespace detail

/// Anisotropic grid for the witness at (N, beta). The xi_1 spacing is M / K
/// with K = round((m + 1/2) M / a): M is then a lattice point and each open
/// slab of width a holds exactly m modes.
inline GridSpec witness_grid(double N, double beta, const WitnessGridOptions& opt = {}) {
    check_contraction(N, beta);
    if (opt.dim < 1 || opt.dim > 3) throw PreconditionError("witness grid dimension must be 1, 2 or 3");
    if (opt.modes_per_bump < 4) throw PreconditionError("witness needs at least 4 modes per bump");
    const double M = std::pow(N, beta);
    const double a = 1.0 / M;
    const double K = std::round((opt.modes_per_bump + 0.5) * M / a);
    const double d1 = M / K;
    const double reach = 2 * M + 2 * a + 1.0;
    int n1 = 2 * (static_cast<int>(std::floor(reach / d1)) + 1);
    n1 = detail::fft_friendly(n1 + n1 % 2);

    std::vector<double> L{2 * std::numbers::pi / d1};
    std::vector<int> n{n1};
    for (int ax = 1; ax < opt.dim; ++ax) {
        L.push_back(2 * std::numbers::pi / opt.transverse_spacing);
        n.push_back(opt.transverse_modes);
    }
    return GridSpec(L, n, false);
}

struct ResonantDatum {
    double N;
    double beta;
    double q;
    WitnessVariant variant;
    SpectralField field;
    Interval low;
    Interval high;
    double low_amplitude;
    double high_amplitude;
    int low_columns;   ///< xi_1 columns carrying the low bump
    int high_columns;
};

/// Builds f^ on the given grid. Modes strictly inside the slabs receive the
/// amplitude times sqrt(cell volume), so that grid norms approximate the
/// continuum ones.
inline ResonantDatum build_resonant_datum(double N, double beta, double q, const GridSpec& grid,
                                          WitnessVariant variant = WitnessVariant::resonant) {
    check_contraction(N, beta);
    if (!(q >= 1.0)) throw PreconditionError("witness requires q >= 1");
    const double M = std::pow(N, beta);
    const double a = 1.0 / M;
    const Interval low{0.0, a};
    const Interval high = variant == WitnessVariant::resonant ? Interval{M, M + a} : Interval{-M - a, -M};
    const double amp_low = std::pow(N, beta / 2);
    const double amp_high = std::pow(N, -beta * (q - 0.5));

    const double d1 = grid.spacing(0);
    const double tol1 = 1e-9 * d1;
    int n_low = 0, n_high = 0;
    for (double k : grid.wavenumbers(0)) {
        n_low += low.contains(k, tol1);
        n_high += high.contains(k, tol1);
    }
    if (n_low < 4 || n_high < 4)
        throw ResolutionError("witness grid resolves the slabs with " + std::to_string(n_low) + " and " +
                              std::to_string(n_high) + " modes; at least 4 per bump are required");
    if (!(grid.max_wavenumber(0) > 2 * M + 1))
        throw ResolutionError("witness grid must extend past 2 N^beta + 1 = " + std::to_string(2 * M + 1) +
                              " in xi_1, reaches " + std::to_string(grid.max_wavenumber(0)));
    for (int ax = 1; ax < grid.dim(); ++ax) {
        const double h = grid.spacing(ax);
        int inside = 0;
        for (double k : grid.wavenumbers(ax)) inside += k > h * 1e-9 && k < 1.0 - h * 1e-9;
        if (inside < 1)
            throw ResolutionError("transverse axis " + std::to_string(ax) + " has no mode inside (0, 1)");
        if (!(grid.max_wavenumber(ax) >= 2.0))
            throw ResolutionError("transverse axis " + std::to_string(ax) + " must reach |xi| = 2");
    }

    double cell = 1.0;
    for (int ax = 0; ax < grid.dim(); ++ax) cell *= grid.spacing(ax);
    const double root_cell = std::sqrt(cell);

    SpectralField f(grid);
    for_each_mode(grid, [&](std::size_t i, const Wavevector& k) {
        for (int ax = 1; ax < grid.dim(); ++ax) {
            const double h = grid.spacing(ax);
            if (!(k[ax] > h * 1e-9 && k[ax] < 1.0 - h * 1e-9)) return;
        }
        if (low.contains(k[0], tol1))
            f[i] = amp_low * root_cell;
        else if (high.contains(k[0], tol1))
            f[i] = amp_high * root_cell;
    });
    return {N, beta, q, variant, std::move(f), low, high, amp_low, amp_high, n_low, n_high};
}

/// Interaction-picture accumulator for F. advance_to() may be called
/// repeatedly; quadrature nodes sit on the lattice j * step from t = 0 plus
/// the stage endpoints.
class DuhamelAccumulator {
public:
    DuhamelAccumulator(SpectralField f, PotentialProfile profile, double N, double beta, double step = 0.0)
        : f_(std::move(f)), multiplier_(profile, N, beta), acc_(f_.grid()) {
        const GridSpec& g = f_.grid();
        k2_.resize(g.size());
        for_each_mode(g, [&](std::size_t i, const Wavevector& k) { k2_[i] = norm2(k); });
        w_table_ = tabulate_multiplier(g, multiplier_);
        max_step_ = 2 * std::numbers::pi / (20.0 * g.max_wavevector_norm2());
        if (step == 0.0) {
            // Largest step below the bound that divides unit time.
            step_ = 1.0 / std::ceil(1.0 / max_step_);
        } else {
            if (!(step > 0.0) || step > max_step_ * (1 + 1e-12))
                throw PreconditionError("quadrature step " + std::to_string(step) +
                                        " exceeds the phase-resolution bound " + std::to_string(max_step_));
            step_ = step;
        }
        phi_.resize(g.size());
        rho_.resize(g.size());
    }

    double time() const { return t_; }
    double step() const { return step_; }
    double max_step() const { return max_step_; }

    /// Integrates the Duhamel integrand up to t.
    void advance_to(double t) {
        if (t < t_) throw PreconditionError("Duhamel accumulator cannot run backwards");
        if (t == t_) return;
        // Nodes: t_, then lattice points strictly inside, then t.
        std::vector<double> nodes{t_};
        for (auto j = static_cast<std::int64_t>(std::floor(t_ / step_ + 1e-9)) + 1;; ++j) {
            const double s = static_cast<double>(j) * step_;
            if (s >= t - 1e-12 * step_) break;
            if (s > t_ + 1e-12 * step_) nodes.push_back(s);
        }
        nodes.push_back(t);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double left = i > 0 ? nodes[i] - nodes[i - 1] : 0.0;
            const double right = i + 1 < nodes.size() ? nodes[i + 1] - nodes[i] : 0.0;
            accumulate(nodes[i], 0.5 * (left + right));
        }
        t_ = t;
    }

    /// F(t) at the current time.
    SpectralField forcing() const {
        SpectralField out = acc_;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::polar(1.0, -t_ * k2_[i]);
        return out;
    }

private:
    // acc += w * e^{is|k|^2} g^(s)
    void accumulate(double s, double weight) {
        const GridSpec& g = f_.grid();
        const double inv_sqrt_vol = 1.0 / std::sqrt(g.volume());
        const double fwd = std::sqrt(g.volume()) / static_cast<double>(g.size());
        for (std::size_t i = 0; i < phi_.size(); ++i) phi_[i] = f_[i] * std::polar(1.0, -s * k2_[i]);
        detail::fft_inplace(phi_, g.dim(), g.shape(), detail::FftDirection::backward);
        for (std::size_t i = 0; i < phi_.size(); ++i) {
            phi_[i] *= inv_sqrt_vol;
            rho_[i] = std::norm(phi_[i]);
        }
        detail::fft_inplace(rho_, g.dim(), g.shape(), detail::FftDirection::forward);
        for (std::size_t i = 0; i < rho_.size(); ++i) rho_[i] *= fwd * w_table_[i];
        detail::fft_inplace(rho_, g.dim(), g.shape(), detail::FftDirection::backward);
        for (std::size_t i = 0; i < phi_.size(); ++i) phi_[i] *= rho_[i] * inv_sqrt_vol;
        detail::fft_inplace(phi_, g.dim(), g.shape(), detail::FftDirection::forward);
        for (std::size_t i = 0; i < phi_.size(); ++i)
            acc_[i] += weight * fwd * phi_[i] * std::polar(1.0, s * k2_[i]);
    }

    SpectralField f_;
    ScaledDeviationMultiplier multiplier_;
    SpectralField acc_;
    std::vector<double> k2_;
    std::vector<Complex> w_table_;
    std::vector<Complex> phi_;
    std::vector<Complex> rho_;
    double step_ = 0.0;
    double max_step_ = 0.0;
    double t_ = 0.0;
};

struct ForcingOptions {
    double step = 0.0;  ///< quadrature step; 0 picks the default
    bool normalize = true;  ///< rescale f to unit H^q norm first
};

/// Datum field, rescaled to unit H^q norm when requested.
inline SpectralField witness_input(const ResonantDatum& datum, bool normalize) {
    SpectralField f = datum.field;
    if (normalize) f *= 1.0 / sobolev_norm(f, datum.q);
    return f;
}

inline SpectralField duhamel_forcing(const ResonantDatum& datum, double t, const PotentialProfile& profile,
                                     const ForcingOptions& opt = {}) {
    if (!(t >= 0.0)) throw PreconditionError("duhamel_forcing needs t >= 0");
    DuhamelAccumulator acc(witness_input(datum, opt.normalize), profile, datum.N, datum.beta, opt.step);
    acc.advance_to(t);
    return acc.forcing();
}

struct SlabMass {
    std::string name;
    Interval xi1;
    double h1_mass;  ///< sum of (1 + |k|^2) |F^|^2 over the slab
};

/// H^1 mass of F in the xi_1 slabs produced by sums and differences of the input slabs.
inline std::vector<SlabMass> slab_decomposition(const SpectralField& F, double N, double beta) {
    const double M = std::pow(N, beta);
    const double a = 1.0 / M;
    std::vector<SlabMass> slabs{{"low", {-a, a}, 0.0},
                                {"mid", {M - a, M + 2 * a}, 0.0},
                                {"high", {2 * M - a, 2 * M + 2 * a}, 0.0},
                                {"negative", {-M - 2 * a, -M + a}, 0.0},
                                {"other", {0.0, 0.0}, 0.0}};
    const double tol = 1e-9 * F.grid().spacing(0);
    for_each_mode(F.grid(), [&](std::size_t i, const Wavevector& k) {
        const double w = (1.0 + norm2(k)) * std::norm(F[i]);
        for (std::size_t s = 0; s + 1 < slabs.size(); ++s)
            if (slabs[s].xi1.contains(k[0], -tol)) {
                slabs[s].h1_mass += w;
                return;
            }
        slabs.back().h1_mass += w;
    });
    return slabs;
}

/// Ratio of the mid slab's H^1 mass to the largest other slab.
inline double mid_slab_dominance(const std::vector<SlabMass>& slabs) {
    double mid = 0.0, other = 0.0;
    for (const auto& s : slabs) {
        if (s.name == "mid")
            mid = s.h1_mass;
        else
            other = std::max(other, s.h1_mass);
    }
    return other == 0.0 ? HUGE_VAL : mid / other;
}

/// Largest |F^| outside xi_1 in (lo1, hi1) and transverse |xi| in (lo_t, hi_t).
inline double max_outside_support(const SpectralField& F, Interval xi1, Interval transverse) {
    double worst = 0.0;
    const GridSpec& g = F.grid();
    const double tol = 1e-9 * g.spacing(0);
    for_each_mode(g, [&](std::size_t i, const Wavevector& k) {
        bool inside = xi1.contains(k[0], -tol);
        for (int ax = 1; ax < g.dim(); ++ax) inside = inside && transverse.contains(k[ax], -1e-9);
        if (!inside) worst = std::max(worst, std::abs(F[i]));
    });
    return worst;
}

struct WitnessSample {
    std::int64_t N;
    double f_hq;        ///< ||f||_{H^q} of the unnormalized datum
    double F_h1;        ///< ||F(t)||_{H^1}
    double rescaled;    ///< N^{q beta} ||F(t)||_{H^1}
    double dominance;   ///< mid slab over the largest other slab
    std::size_t quadrature_nodes;
    std::size_t modes;
};

struct LowerBoundReport {
    double beta;
    double q;
    double t;
    WitnessVariant variant;
    std::vector<WitnessSample> samples;
    RateFit fit;
    double band;          ///< max / min of the rescaled values
    double slope_lo;
    double slope_hi;
    bool slope_ok;
    bool band_ok;
    bool pass;
};

struct LowerBoundOptions {
    double t = 1.0;
    WitnessVariant variant = WitnessVariant::resonant;
    WitnessGridOptions grid;
    ForcingOptions forcing;
    double sigma = 1.0;  ///< Gaussian profile width
    double b0 = 1.0;
};

inline WitnessSample witness_sample(std::int64_t N, double beta, double q, const LowerBoundOptions& opt) {
    const GridSpec grid = witness_grid(static_cast<double>(N), beta, opt.grid);
    const auto datum = build_resonant_datum(static_cast<double>(N), beta, q, grid, opt.variant);
    const auto profile = PotentialProfile::gaussian(grid.dim(), opt.b0, opt.sigma);
    DuhamelAccumulator acc(witness_input(datum, opt.forcing.normalize), profile, datum.N, beta, opt.forcing.step);
    acc.advance_to(opt.t);
    const SpectralField F = acc.forcing();
    const double h1 = sobolev_norm(F, 1.0);
    const auto nodes = static_cast<std::size_t>(std::ceil(opt.t / acc.step() - 1e-9)) + 1;
    return {N,
            sobolev_norm(datum.field, q),
            h1,
            std::pow(static_cast<double>(N), q * beta) * h1,
            mid_slab_dominance(slab_decomposition(F, datum.N, beta)),
            nodes,
            grid.size()};
}

/// ||F(t)||_{H^1} over a dyadic N sweep; passes when the slope lies within
/// 15% of -q beta and the rescaled values stay inside a factor-2 band.
inline LowerBoundReport verify_lower_bound(double beta, double q, const std::vector<std::int64_t>& N_list,
                                           const LowerBoundOptions& opt = {}) {
    if (N_list.size() < 4) throw PreconditionError("verify_lower_bound needs at least 4 values of N");
    if (!all_dyadic(N_list)) throw PreconditionError("verify_lower_bound requires dyadic N values");
    LowerBoundReport rep{beta, q, opt.t, opt.variant, {}, {}, 0.0, -1.15 * q * beta, -0.85 * q * beta,
                         false, false, false};
    std::vector<RateSample> rs;
    double lo = HUGE_VAL, hi = 0.0;
    for (auto N : N_list) {
        rep.samples.push_back(witness_sample(N, beta, q, opt));
        const auto& s = rep.samples.back();
        rs.push_back({static_cast<double>(N), s.F_h1});
        lo = std::min(lo, s.rescaled);
        hi = std::max(hi, s.rescaled);
    }
    FitOptions fo;
    fo.allow_discard = false;
    rep.fit = fit_rate(rs, fo);
    rep.band = hi / lo;
    rep.slope_ok = rep.fit.slope >= rep.slope_lo && rep.fit.slope <= rep.slope_hi;
    rep.band_ok = rep.band <= 2.0;
    rep.pass = rep.slope_ok && rep.band_ok;
    return rep;
}

}  // namespace nlsrate
