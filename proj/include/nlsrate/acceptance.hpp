#pragma once

// End-to-end acceptance checks, shared by the acceptance test binary and
// `nlsrate --check`. Each criterion yields one pass/fail verdict plus detail
// lines; tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlsrate/boardgame.hpp"
#include "nlsrate/evolution.hpp"
#include "nlsrate/grid.hpp"
#include "nlsrate/harness.hpp"
#include "nlsrate/hierarchy.hpp"
#include "nlsrate/norms.hpp"
#include "nlsrate/potential.hpp"
#include "nlsrate/resonance.hpp"
#include "nlsrate/testing/kernel_oracle.hpp"

namespace nlsrate::acceptance {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = true;
    std::vector<std::string> details;
    double seconds = 0.0;

    CriterionResult() = default;
    CriterionResult(int i, std::string t) : id(i), title(std::move(t)) {}

    void check(bool ok, const std::string& what) {
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        pass = pass && ok;
    }
    void note(const std::string& what) { details.push_back("     " + what); }
};

inline std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

inline std::vector<std::int64_t> dyadic_range(int lo, int hi) {
    std::vector<std::int64_t> v;
    for (int p = lo; p <= hi; ++p) v.push_back(std::int64_t{1} << p);
    return v;
}

struct Options {
    bool include_3d = true;
};

/// Runs the criteria in order. Criterion 7 reuses the evolution runs from 3.
class Suite {
public:
    explicit Suite(Options opt = {}) : opt_(opt) {}

    std::vector<CriterionResult> run(std::ostream* progress = nullptr) {
        std::vector<std::function<CriterionResult()>> all{
            [&] { return convolution_rate(); }, [&] { return bilinear_pairing(); },
            [&] { return biscattering_rate(); }, [&] { return resonance_witness(); },
            [&] { return boardgame(); },        [&] { return hierarchy(); },
            [&] { return solver_integrity(); }};
        std::vector<CriterionResult> out;
        for (auto& c : all) {
            const auto t0 = std::chrono::steady_clock::now();
            CriterionResult r;
            try {
                r = c();
            } catch (const std::exception& e) {
                r.id = static_cast<int>(out.size()) + 1;
                r.title = "criterion raised";
                r.check(false, std::string("exception: ") + e.what());
            }
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (progress) print(*progress, r);
            out.push_back(std::move(r));
        }
        return out;
    }

    static void print(std::ostream& os, const CriterionResult& r) {
        os << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << "  " << r.title
           << fmt("  (%.1fs)", r.seconds) << "\n";
        for (const auto& d : r.details) os << "    " << d << "\n";
        os.flush();
    }

    // 1. ||W_N * f|| / ||D^s f|| decay, multiplier evaluation only.
    CriterionResult convolution_rate() {
        CriterionResult r{1, "convolution rate"};
        const double beta = 0.25;
        const auto Ns = dyadic_range(4, 12);
        auto measure = [&](const GridSpec& g, const PotentialProfile& p, bool smooth) {
            SpectralField f(g);
            for_each_mode(g, [&](std::size_t i, const Wavevector& k) {
                f[i] = smooth ? std::exp(-norm2(k) / 2) : std::pow(1 + norm2(k), -(1.0 + 0.5 + 0.01) / 2);
            });
            return measure_convolution_rate(p, f, 1.0, Ns, beta).fit.slope;
        };
        const auto g = GridSpec::cube(1, 16 * std::numbers::pi, 2048);
        const auto shifted = PotentialProfile::shifted_gaussian(1, 1.0, 1.0, 1.0);
        const auto even = PotentialProfile::gaussian(1, 1.0, 1.0);
        const double a = measure(g, shifted, true);
        const double b = measure(g, even, true);
        const double c = measure(g, even, false);
        r.check(a >= -1.1 * beta && a <= -0.9 * beta, fmt("non-even profile, smooth data: slope %.4f in [%.4f, %.4f]", a, -1.1 * beta, -0.9 * beta));
        r.check(b >= -2.2 * beta && b <= -1.8 * beta, fmt("even profile, smooth data: slope %.4f in [%.4f, %.4f]", b, -2.2 * beta, -1.8 * beta));
        r.check(c >= -1.2 * beta && c <= -0.8 * beta, fmt("even profile, H^1-limited data: slope %.4f in [%.4f, %.4f]", c, -1.2 * beta, -0.8 * beta));
        rate_quantities_.push_back({"convolution slope (a)", a, measure(g.doubled_box(), shifted, true)});
        rate_quantities_.push_back({"convolution slope (b)", b, measure(g.doubled_box(), even, true)});
        rate_quantities_.push_back({"convolution slope (c)", c, measure(g.doubled_box(), even, false)});
        return r;
    }

    // 2. Plancherel pairing bound on random pairs.
    CriterionResult bilinear_pairing() {
        CriterionResult r{2, "bilinear pairing bound"};
        const auto g = GridSpec::cube(1, 16 * std::numbers::pi, 256);
        const auto Ns = dyadic_range(4, 10);
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> gauss;
        int total = 0, passed = 0;
        for (const auto& profile : {PotentialProfile::gaussian(1, 1.0, 1.0), PotentialProfile::shifted_gaussian(1, 1.0, 1.0, 1.0)}) {
            for (int pair = 0; pair < 1000; ++pair) {
                SpectralField f1(g), f2(g);
                const double w1 = 0.5 + 10 * detail::uniform01(rng), w2 = 0.5 + 10 * detail::uniform01(rng);
                for_each_mode(g, [&](std::size_t i, const Wavevector& k) {
                    const double e1 = std::exp(-norm2(k) / (2 * w1 * w1)), e2 = std::exp(-norm2(k) / (2 * w2 * w2));
                    f1[i] = e1 * Complex(gauss(rng), gauss(rng));
                    f2[i] = e2 * Complex(gauss(rng), gauss(rng));
                });
                for (auto N : Ns) {
                    ++total;
                    passed += bilinear_pairing_bound_check(f1, f2, profile, static_cast<double>(N), 0.2).pass;
                }
            }
        }
        r.check(passed == total, fmt("%d / %d instances satisfy the bound (2 profiles x 1000 pairs x 7 N)", passed, total));
        return r;
    }

    // 3. Finite-time comparison rate between the cubic and Hartree flows.
    CriterionResult biscattering_rate() {
        CriterionResult r{3, "comparison rate"};
        const double beta = 0.2;
        const auto Ns = dyadic_range(5, 10);
        const auto g = GridSpec::cube(1, 16 * std::numbers::pi, 512, true);
        const auto profile = PotentialProfile::gaussian(1, 1.0, 1.0);
        SweepOptions so;
        so.box_check = true;

        DataRecipe hq;
        hq.kind = RecipeKind::hq_limited;
        hq.q = 1.0;
        hq.amplitude = 0.4;
        hq.cutoff = 20.0;
        hq.seed = 7;
        hq_ = sweep_rate(hq, beta, Ns, 1.0, 1e-3, profile, g, so);
        r.check(hq_->fit.slope >= -0.26 && hq_->fit.slope <= -0.14,
                fmt("H^1-limited data: slope %.4f in [-0.26, -0.14]", hq_->fit.slope));

        DataRecipe smooth;
        smooth.kind = RecipeKind::smooth_random;
        smooth.q = 1.0;
        smooth.amplitude = 0.4;
        smooth.seed = 7;
        smooth_ = sweep_rate(smooth, beta, Ns, 1.0, 1e-3, profile, g, so);
        r.check(smooth_->fit.slope >= -0.50 && smooth_->fit.slope <= -0.30,
                fmt("smooth data: slope %.4f in [-0.50, -0.30]", smooth_->fit.slope));

        for (const auto* rep : {&*hq_, &*smooth_}) {
            r.check(rep->fit.slope < 0.0, fmt("%s slope is negative", to_string(rep->recipe.kind)));
            r.check(*rep->dt_change < 0.02,
                    fmt("%s supDiff change at dt/2 (N = %lld): %.2e < 2%%", to_string(rep->recipe.kind),
                        static_cast<long long>(rep->rows.back().N), *rep->dt_change));
            rate_quantities_.push_back({std::string(to_string(rep->recipe.kind)) + " sweep slope", rep->fit.slope, *rep->box_slope});
            for (const auto& row : rep->rows) conservation_.push_back({std::string(to_string(rep->recipe.kind)) + fmt(" N=%lld", static_cast<long long>(row.N)), row.mass_drift, row.energy_drift});
        }

        if (opt_.include_3d) {
            const auto g3 = GridSpec::cube(3, 4 * std::numbers::pi, 64, true);
            DataRecipe s3 = smooth;
            const auto c = three_d_confirmation(smooth_->fit.slope, s3, beta, 1.0, 1e-3,
                                                PotentialProfile::gaussian(3, 1.0, 1.0), g3, 32, 128);
            r.check(c.pass, fmt("3D 64^3: d(32)/d(128) = %.4f vs 1D prediction %.4f (ratio %.3f, band factor 1.5)",
                                c.measured_ratio, c.predicted_ratio, c.measured_ratio / c.predicted_ratio));
            conservation_.push_back({"3D runs", c.mass_drift, c.energy_drift});
        } else {
            r.note("3D confirmation skipped");
        }
        return r;
    }

    // 4. Witness lower bound and resonance ablation.
    CriterionResult resonance_witness() {
        CriterionResult r{4, "optimality witness"};
        const auto Ns = dyadic_range(4, 9);
        const double beta = 0.25;
        for (double q : {1.0, 2.0}) {
            LowerBoundOptions lo;
            const auto rep = verify_lower_bound(beta, q, Ns, lo);
            r.check(rep.slope_ok, fmt("q = %g: slope %.4f in [%.4f, %.4f]", q, rep.fit.slope, rep.slope_lo, rep.slope_hi));
            r.check(rep.band_ok, fmt("q = %g: rescaled band %.3f <= 2", q, rep.band));
            double fmin = HUGE_VAL, fmax = 0.0;
            for (const auto& s : rep.samples) {
                fmin = std::min(fmin, s.f_hq);
                fmax = std::max(fmax, s.f_hq);
            }
            r.check(fmax / fmin <= 2.0, fmt("q = %g: ||f||_{H^q} max/min over the sweep %.3f <= 2", q, fmax / fmin));
            const auto& last = rep.samples.back();
            r.check(last.dominance >= 2.0, fmt("q = %g: mid-slab dominance at N = %lld: %.1f >= 2", q, static_cast<long long>(last.N), last.dominance));

            lo.variant = WitnessVariant::ablated;
            const auto ab = witness_sample(Ns.back(), beta, q, lo);
            const double drop = last.F_h1 / ab.F_h1;
            r.check(drop >= 5.0, fmt("q = %g: ablation drop at N = %lld: %.3f >= 5", q, static_cast<long long>(Ns.back()), drop));
        }
        return r;
    }

    // 5. Exhaustive board-game counting.
    CriterionResult boardgame() {
        CriterionResult r{5, "board-game counting"};
        int bad = 0;
        for (int k = 1; k <= 6; ++k)
            for (int j = 1; j <= 6; ++j) {
                const auto row = verify_boardgame(k, j);
                if (!row.ok) {
                    ++bad;
                    r.check(false, fmt("(k, j) = (%d, %d): reduced %llu, rejects %llu, bound %llu", k, j,
                                       static_cast<unsigned long long>(row.reduced),
                                       static_cast<unsigned long long>(row.rejects),
                                       static_cast<unsigned long long>(row.catalan)));
                }
            }
        r.check(bad == 0, "reduced <= binom(k+2j-2, j) <= 2^(k+2j-2), bijection, and reduced + rejects = binom for all k, j <= 6");
        return r;
    }

    // 6. One-particle algebra against brute-force kernels.
    CriterionResult hierarchy() {
        CriterionResult r{6, "hierarchy algebra"};
        const double L = 2 * std::numbers::pi;
        const auto g = GridSpec::cube(1, L, 8);
        std::mt19937_64 rng(99);
        std::normal_distribution<double> gauss;
        auto random_field = [&](double scale) {
            SpectralField f(g);
            for (auto& c : f.coefficients()) c = scale * Complex(gauss(rng), gauss(rng));
            return f;
        };
        auto tiny = [&](const SpectralField& f) {
            const auto p = transform_inverse(f);
            return testing::TinyField{L, std::vector<Complex>(p.values().begin(), p.values().end())};
        };
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const auto a = random_field(0.3), b = random_field(0.3);
            for (int k : {1, 2}) {
                for (double alpha : {0.0, 1.0}) {
                    const double ref = testing::brute_level_norm(tiny(a), alpha, k);
                    worst = std::max(worst, std::abs(tensor_level_norm(a, alpha, k) - ref) / ref);
                }
                const double ref = testing::brute_difference_norm(tiny(a), tiny(b), k);
                worst = std::max(worst, std::abs(tensor_difference_norm(a, b, k) - ref) / ref);
            }
        }
        r.check(worst <= 1e-10, fmt("closed forms vs 2k-variable kernels (k = 1, 2; 8 modes): max rel. error %.2e <= 1e-10", worst));

        const auto g2 = GridSpec::cube(1, 2 * std::numbers::pi, 32);
        int total = 0, passed = 0, hyp = 0;
        for (int pair = 0; pair < 1000; ++pair) {
            SpectralField x(g2), y(g2);
            for_each_mode(g2, [&](std::size_t i, const Wavevector& k) {
                const double e = 1.0 / (1 + norm2(k));
                x[i] = e * Complex(gauss(rng), gauss(rng));
                y[i] = e * Complex(gauss(rng), gauss(rng));
            });
            // Place both inside the unit H^1 ball; nearby pairs included.
            x *= detail::uniform01(rng) / sobolev_norm(x, 1.0);
            if (pair % 2 == 0) {
                y *= detail::uniform01(rng) / sobolev_norm(y, 1.0);
            } else {
                y *= 1e-3 * detail::uniform01(rng) / sobolev_norm(y, 1.0);
                y += x;
                if (sobolev_norm(y, 1.0) > 1.0) y *= 1.0 / sobolev_norm(y, 1.0);
            }
            for (int k = 1; k <= 5; ++k) {
                ++total;
                try {
                    passed += binomial_bound_check(x, y, k, 1.0).pass;
                } catch (const HypothesisViolation&) {
                    ++hyp;
                }
            }
        }
        r.check(passed == total, fmt("binomial bound: %d / %d pass (C1 = 1, k <= 5, %d hypothesis violations)", passed, total, hyp));

        double master_err = 0.0;
        bool diverges = true;
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_field(0.2 + detail::uniform01(rng));
            const double n2 = std::pow(sobolev_norm(f, 1.0), 2);
            const double Z = n2 * (1.0 + 4 * detail::uniform01(rng)) + 1e-3;
            const double rho = n2 / Z;
            const double ref = rho / (1 - rho);
            master_err = std::max(master_err, std::abs(master_norm_factorized(f, 1.0, Z) - ref) / ref);
            for (double zz : {n2, 0.5 * n2}) {
                try {
                    master_norm_factorized(f, 1.0, zz);
                    diverges = false;
                } catch (const DivergenceError&) {
                }
            }
        }
        r.check(master_err <= 1e-12, fmt("master norm vs geometric closed form: max rel. error %.2e <= 1e-12", master_err));
        r.check(diverges, "master norm raises divergence for r >= 1");
        return r;
    }

    // 7. Conservation, exactness, splitting order, box independence.
    CriterionResult solver_integrity() {
        CriterionResult r{7, "solver integrity"};
        if (conservation_.empty()) r.check(false, "no acceptance runs recorded");
        double mass = 0.0, en = 0.0;
        for (const auto& c : conservation_) {
            mass = std::max(mass, c.mass);
            en = std::max(en, c.energy);
        }
        r.check(mass <= 1e-10, fmt("max relative mass drift over %zu acceptance runs: %.2e <= 1e-10", conservation_.size(), mass));
        r.check(en <= 1e-6, fmt("max relative energy drift over the acceptance runs: %.2e <= 1e-6", en));

        // Plane waves: cubic and Hartree, several modes and amplitudes.
        double worst = 0.0;
        for (int d : {1, 2, 3}) {
            const auto g = GridSpec::cube(d, 2 * std::numbers::pi, 8, true);
            const double vol = g.volume();
            for (auto [m, A] : {std::pair{std::array<int, 3>{1, 0, 0}, 0.7}, std::pair{std::array<int, 3>{2, 1, 0}, 1.3}}) {
                if (d == 1) m[1] = 0;
                SpectralField f = single_mode(g, m, A * std::sqrt(vol));
                const double k2 = norm2(g.wavevector(g.flat(g.storage_index(0, m[0]), g.storage_index(1, m[1]), g.storage_index(2, m[2]))));
                const double T = 1.0;
                const Complex exact = A * std::sqrt(vol) * std::polar(1.0, -(k2 + A * A) * T);
                for (auto spec : {EvolutionSpec::cubic(g, 1.0, 1e-3, T, 1000),
                                  EvolutionSpec::hartree(g, PotentialProfile::gaussian(d, 1.0, 1.0), 64, 0.25, 1e-3, T, 1000)}) {
                    const auto run = solve(spec, f);
                    SpectralField expect = single_mode(g, m, exact);
                    const double err = l2_norm(run.final().field - expect) / l2_norm(expect);
                    worst = std::max(worst, err);
                }
            }
        }
        r.check(worst <= 1e-12, fmt("plane waves (cubic and Hartree, d = 1..3, T = 1): max rel. error %.2e <= 1e-12", worst));

        // Strang order: errors at dt and dt/2 against a dt/8 reference.
        {
            const auto g = GridSpec::cube(1, 16 * std::numbers::pi, 256, true);
            DataRecipe rec;
            rec.kind = RecipeKind::hq_limited;
            rec.amplitude = 1.0;
            rec.cutoff = 10.0;
            const auto f = make_initial_data(rec, g);
            const double dt = 5e-3;
            auto final_at = [&](double h) { return solve(EvolutionSpec::cubic(g, 1.0, h, 1.0, 1 << 20), f).final().field; };
            const auto ref = final_at(dt / 8);
            const double ratio = h1_distance(final_at(dt), ref) / h1_distance(final_at(dt / 2), ref);
            r.check(ratio >= 3.5 && ratio <= 4.5, fmt("Strang dt-halving error ratio (dt = %.0e vs dt/8 reference): %.3f in [3.5, 4.5]", dt, ratio));
        }

        for (const auto& q : rate_quantities_) {
            const double change = std::abs(q.doubled - q.value) / std::abs(q.value);
            r.check(change < 0.02, fmt("box doubling, %s: %.4f -> %.4f (%.2e < 2%%)", q.name.c_str(), q.value, q.doubled, change));
        }
        if (opt_.include_3d) r.note("3D confirmation is a two-point ratio; its box is not doubled");
        return r;
    }

private:
    struct RateQuantity {
        std::string name;
        double value;
        double doubled;
    };
    struct Conservation {
        std::string run;
        double mass;
        double energy;
    };

    Options opt_;
    std::optional<SweepReport> hq_;
    std::optional<SweepReport> smooth_;
    std::vector<RateQuantity> rate_quantities_;
    std::vector<Conservation> conservation_;
};

}  // namespace nlsrate::acceptance
