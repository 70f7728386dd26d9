#pragma once

// Strang split-step integration of
//
//     i d/dt phi = -Laplace phi + b0 |phi|^2 phi              (cubic)
//     i d/dt phi = -Laplace phi + (V_N * |phi|^2) phi         (Hartree)
//
// Both substeps are exact: the kinetic one is diagonal in Fourier space and
// the nonlinear one preserves |phi|^2 pointwise, so it is a pure phase
// rotation by the (frozen) potential. The two equations share one code path;
// they differ only in the density multiplier table (b0 versus V^(k N^-beta)).
//
// With dealiasing on, the 2/3 mask is applied to the density multiplier
// rather than to phi after the product. The phase rotation is then still a
// unitary pointwise map and mass is conserved to rounding.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nlsrate/error.hpp"
#include "nlsrate/fft.hpp"
#include "nlsrate/grid.hpp"
#include "nlsrate/norms.hpp"
#include "nlsrate/potential.hpp"

namespace nlsrate {

enum class Equation { cubic, hartree };

inline const char* to_string(Equation e) { return e == Equation::cubic ? "cubic" : "hartree"; }

struct EvolutionSpec {
    Equation equation = Equation::cubic;
    double b0 = 1.0;
    std::optional<PotentialProfile> profile;  // hartree only
    double N = 1.0;
    double beta = 0.5;
    GridSpec grid;
    double dt = 1e-3;
    double T = 1.0;
    int stride = 1;

    static EvolutionSpec cubic(GridSpec grid, double b0, double dt, double T, int stride = 1) {
        EvolutionSpec s;
        s.equation = Equation::cubic;
        s.b0 = b0;
        s.grid = std::move(grid);
        s.dt = dt;
        s.T = T;
        s.stride = stride;
        return s;
    }

    static EvolutionSpec hartree(GridSpec grid, PotentialProfile profile, double N, double beta, double dt,
                                 double T, int stride = 1) {
        EvolutionSpec s;
        s.equation = Equation::hartree;
        s.b0 = profile.b0();
        s.profile = std::move(profile);
        s.N = N;
        s.beta = beta;
        s.grid = std::move(grid);
        s.dt = dt;
        s.T = T;
        s.stride = stride;
        return s;
    }

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
        if (!(T >= 0.0) || !std::isfinite(T)) throw PreconditionError("T must be nonnegative");
        if (T > 0.0 && dt > T * (1 + 1e-12)) throw PreconditionError("dt must not exceed T");
        if (stride < 1) throw PreconditionError("sample stride must be >= 1");
        if (equation == Equation::hartree) {
            if (!profile) throw PreconditionError("hartree evolution needs a potential profile");
            check_contraction(N, beta);
        }
    }
};

/// Fourier multiplier of the potential built from |phi|^2, including the dealiasing mask.
inline std::vector<Complex> density_multiplier(const EvolutionSpec& spec) {
    const GridSpec& g = spec.grid;
    std::vector<Complex> table;
    if (spec.equation == Equation::cubic) {
        table.assign(g.size(), Complex(spec.b0));
    } else {
        table = tabulate_multiplier(g, ScaledMultiplier(*spec.profile, spec.N, spec.beta));
    }
    if (g.dealias())
        for (std::size_t i = 0; i < table.size(); ++i)
            if (!g.retained(i)) table[i] = 0.0;
    return table;
}

struct Snapshot {
    double t;
    SpectralField field;
    double mass;
    double energy;
    double h1;
};

struct EvolutionRun {
    EvolutionSpec spec;
    std::vector<Snapshot> snapshots;
    std::size_t steps = 0;

    const Snapshot& initial() const { return snapshots.front(); }
    const Snapshot& final() const { return snapshots.back(); }

    /// max_t |m(t) - m(0)| / m(0); zero for the zero field.
    double mass_drift() const { return drift([](const Snapshot& s) { return s.mass; }); }
    double energy_drift() const { return drift([](const Snapshot& s) { return s.energy; }); }

private:
    template <typename Fn>
    double drift(Fn get) const {
        const double ref = get(snapshots.front());
        double worst = 0.0;
        for (const auto& s : snapshots) worst = std::max(worst, std::abs(get(s) - ref));
        return ref == 0.0 ? worst : worst / std::abs(ref);
    }
};

/// Preassembled tables for one spec; stepping reuses internal buffers.
class SplitStepSolver {
public:
    explicit SplitStepSolver(EvolutionSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
        potential_ = density_multiplier(spec_);
        half_ = kinetic_half(spec_.dt);
        buffer_.resize(spec_.grid.size());
        density_.resize(spec_.grid.size());
    }

    const EvolutionSpec& spec() const { return spec_; }

    /// One Strang step of size h (defaults to spec.dt) applied in place.
    void step(SpectralField& state, std::optional<double> h = std::nullopt) {
        require_same_grid(state.grid(), spec_.grid, "split-step");
        const bool full = !h || *h == spec_.dt;
        const double tau = full ? spec_.dt : *h;
        const std::vector<Complex> partial = full ? std::vector<Complex>{} : kinetic_half(tau);
        const std::vector<Complex>& half = full ? half_ : partial;

        auto c = state.coefficients();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= half[i];
        nonlinear(state, tau);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= half[i];
    }

    /// max |phi| seen during the last nonlinear substep.
    double last_max_abs() const { return last_max_; }

    double energy(const SpectralField& state) {
        require_same_grid(state.grid(), spec_.grid, "energy");
        double kinetic = 0.0;
        for_each_mode(spec_.grid, [&](std::size_t i, const Wavevector& k) { kinetic += norm2(k) * std::norm(state[i]); });
        density_from(state);
        double interaction = 0.0;
        for (std::size_t i = 0; i < density_.size(); ++i) interaction += (potential_[i] * std::norm(density_[i])).real();
        return kinetic + 0.5 * interaction;
    }

private:
    std::vector<Complex> kinetic_half(double tau) const {
        std::vector<Complex> t(spec_.grid.size());
        for_each_mode(spec_.grid, [&](std::size_t i, const Wavevector& k) {
            t[i] = std::polar(1.0, -0.5 * tau * norm2(k));
        });
        return t;
    }

    // density_ <- normalized coefficients of |phi|^2; buffer_ <- phi on the grid.
    void density_from(const SpectralField& state) {
        const GridSpec& g = spec_.grid;
        const double inv_sqrt_vol = 1.0 / std::sqrt(g.volume());
        const double fwd = std::sqrt(g.volume()) / static_cast<double>(g.size());
        auto c = state.coefficients();
        std::copy(c.begin(), c.end(), buffer_.begin());
        detail::fft_inplace(buffer_, g.dim(), g.shape(), detail::FftDirection::backward);
        for (std::size_t i = 0; i < buffer_.size(); ++i) {
            buffer_[i] *= inv_sqrt_vol;
            density_[i] = std::norm(buffer_[i]);
        }
        detail::fft_inplace(density_, g.dim(), g.shape(), detail::FftDirection::forward);
        for (auto& v : density_) v *= fwd;
    }

    void nonlinear(SpectralField& state, double tau) {
        const GridSpec& g = spec_.grid;
        density_from(state);
        last_max_ = 0.0;
        for (std::size_t i = 0; i < buffer_.size(); ++i) {
            const double a = std::abs(buffer_[i]);
            // NaN compares false and therefore sticks.
            if (!(a <= last_max_) && !std::isnan(last_max_)) last_max_ = a;
        }
        for (std::size_t i = 0; i < density_.size(); ++i) density_[i] *= potential_[i];
        detail::fft_inplace(density_, g.dim(), g.shape(), detail::FftDirection::backward);
        const double inv_sqrt_vol = 1.0 / std::sqrt(g.volume());
        for (std::size_t i = 0; i < buffer_.size(); ++i) {
            const double pot = density_[i].real() * inv_sqrt_vol;
            buffer_[i] *= std::polar(1.0, -pot * tau);
        }
        detail::fft_inplace(buffer_, g.dim(), g.shape(), detail::FftDirection::forward);
        const double fwd = std::sqrt(g.volume()) / static_cast<double>(g.size());
        auto c = state.coefficients();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = buffer_[i] * fwd;
    }

    EvolutionSpec spec_;
    std::vector<Complex> potential_;
    std::vector<Complex> half_;
    std::vector<Complex> buffer_;
    std::vector<Complex> density_;
    double last_max_ = 0.0;
};

inline SpectralField step_cubic(SpectralField state, double dt, double b0) {
    SplitStepSolver solver(EvolutionSpec::cubic(state.grid(), b0, dt, dt));
    solver.step(state);
    return state;
}

inline SpectralField step_hartree(SpectralField state, double dt, const PotentialProfile& profile, double N,
                                  double beta) {
    SplitStepSolver solver(EvolutionSpec::hartree(state.grid(), profile, N, beta, dt, dt));
    solver.step(state);
    return state;
}

inline double energy(const SpectralField& state, const EvolutionSpec& spec) {
    EvolutionSpec s = spec;
    s.dt = 1.0;
    s.T = 1.0;
    SplitStepSolver solver(std::move(s));
    return solver.energy(state);
}

/// Integrates to spec.T, sampling every spec.stride steps and always at T.
inline EvolutionRun solve(const EvolutionSpec& spec, const SpectralField& initial) {
    require_same_grid(initial.grid(), spec.grid, "solve");
    SplitStepSolver solver(spec);
    EvolutionRun run{spec, {}, 0};

    auto record = [&](double t, const SpectralField& f) {
        run.snapshots.push_back({t, f, std::pow(l2_norm(f), 2), solver.energy(f), sobolev_norm(f, 1.0)});
    };

    SpectralField state = initial;
    record(0.0, state);
    if (spec.T == 0.0) return run;

    const double guard = 1e6 * max_abs(transform_inverse(initial));
    const auto full_steps = static_cast<std::size_t>(std::floor(spec.T / spec.dt * (1.0 + 1e-12)));
    const double remainder = spec.T - static_cast<double>(full_steps) * spec.dt;
    const bool partial = remainder > 1e-12 * spec.T;

    auto check = [&](double t) {
        const double m = solver.last_max_abs();
        bool bad = !std::isfinite(m) || (guard > 0.0 && m > guard);
        if (!bad)
            for (const auto& c : state.coefficients())
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                    bad = true;
                    break;
                }
        if (bad)
            throw BlowUpError("blow-up guard tripped at t = " + std::to_string(t) + " (max|phi| = " +
                                  std::to_string(m) + ")",
                              t, m);
    };

    for (std::size_t s = 1; s <= full_steps; ++s) {
        solver.step(state);
        const double t = static_cast<double>(s) * spec.dt;
        check(t);
        ++run.steps;
        const bool last = s == full_steps && !partial;
        if (s % static_cast<std::size_t>(spec.stride) == 0 || last) record(last ? spec.T : t, state);
    }
    if (partial) {
        solver.step(state, remainder);
        check(spec.T);
        ++run.steps;
        record(spec.T, state);
    }
    return run;
}

}  // namespace nlsrate
