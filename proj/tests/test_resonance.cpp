#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "nlsrate/resonance.hpp"

using namespace nlsrate;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Duhamel forcing by direct trilinear mode sums, with the time integral done in closed form:
// F^(k) = V^-1 sum_{k1 - k2 + k3 = k} w(k1 - k2) f1 conj(f2) f3 e^{-itk^2} int_0^t e^{is Omega} ds.
SpectralField direct_forcing(const SpectralField& f, const std::vector<Complex>& w, double t) {
    const GridSpec& g = f.grid();
    SpectralField F(g);
    auto sub = [&](std::size_t a, std::size_t b, int sign) {
        const auto ia = g.unflatten(a), ib = g.unflatten(b);
        std::array<int, 3> r{};
        for (int ax = 0; ax < 3; ++ax) {
            const int n = g.modes(ax);
            r[ax] = ((ia[ax] + sign * ib[ax]) % n + n) % n;
        }
        return g.flat(r[0], r[1], r[2]);
    };
    auto k2 = [&](std::size_t i) { return norm2(g.wavevector(i)); };
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b) {
            const std::size_t m = sub(a, b, -1);
            const Complex pair = w[m] * f[a] * std::conj(f[b]);
            if (pair == Complex(0.0)) continue;
            for (std::size_t c = 0; c < g.size(); ++c) {
                const std::size_t k = sub(m, c, +1);
                const double omega = k2(k) - k2(a) + k2(b) - k2(c);
                const Complex integral =
                    std::abs(omega) < 1e-14 ? Complex(t) : (std::polar(1.0, omega * t) - 1.0) / Complex(0.0, omega);
                F[k] += pair * f[c] * integral * std::polar(1.0, -t * k2(k));
            }
        }
    F *= 1.0 / g.volume();
    return F;
}

SpectralField random_field(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    SpectralField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = Complex(n(rng), n(rng)) / (1.0 + norm2(g.wavevector(i)));
    return f;
}

WitnessGridOptions small_grid(int dim) {
    WitnessGridOptions o;
    o.dim = dim;
    o.transverse_modes = 16;
    o.transverse_spacing = 0.25;
    return o;
}

}  // namespace

TEST_CASE("Duhamel accumulator against direct mode sums", "[resonance]") {
    for (const auto& g : {GridSpec({2 * std::numbers::pi}, {16}), GridSpec({4.0, 6.0}, {8, 6})}) {
        const auto p = PotentialProfile::gaussian(g.dim(), 1.0, 1.0);
        const ScaledDeviationMultiplier m(p, 4.0, 0.5);
        const auto f = random_field(g, 3);
        const auto w = tabulate_multiplier(g, m);
        DuhamelAccumulator acc(f, p, 4.0, 0.5);
        const double step = acc.max_step() / 64;
        DuhamelAccumulator fine(f, p, 4.0, 0.5, step);
        fine.advance_to(0.3);
        fine.advance_to(0.7);
        const auto F = fine.forcing();
        const auto ref = direct_forcing(f, w, 0.7);
        INFO("dim " << g.dim());
        CHECK(l2_norm(F - ref) < 1e-3 * l2_norm(ref));
        CHECK(l2_norm(ref) > 0.0);
    }
}

TEST_CASE("witness grid resolves the slabs", "[resonance]") {
    for (double N : {16.0, 64.0, 512.0})
        for (int m : {4, 6}) {
            auto o = small_grid(2);
            o.modes_per_bump = m;
            const auto g = witness_grid(N, 0.25, o);
            const auto d = build_resonant_datum(N, 0.25, 1.0, g);
            CHECK(d.low_columns == m);
            CHECK(d.high_columns == m);
            // Exactly 2m xi_1 columns carry data.
            std::set<double> columns;
            for_each_mode(g, [&](std::size_t i, const Wavevector& k) {
                if (d.field[i] != Complex(0.0)) columns.insert(k[0]);
            });
            CHECK(columns.size() == static_cast<std::size_t>(2 * m));
            CHECK(g.max_wavenumber(0) > 2 * std::pow(N, 0.25) + 1);
        }
    auto o = small_grid(2);
    o.modes_per_bump = 2;
    CHECK_THROWS_AS(witness_grid(64, 0.25, o), PreconditionError);
    CHECK_THROWS_AS(build_resonant_datum(64, 0.25, 1.0, GridSpec({20.0, 12.0}, {64, 16})), ResolutionError);
    CHECK_THROWS_AS(build_resonant_datum(64, 0.25, 0.5, witness_grid(64, 0.25, small_grid(2))), PreconditionError);
}

TEST_CASE("datum amplitudes and norms", "[resonance]") {
    const double N = 256, beta = 0.25, q = 2.0;
    const auto g = witness_grid(N, beta, small_grid(1));
    const auto d = build_resonant_datum(N, beta, q, g);
    CHECK_THAT(d.low_amplitude, WithinRel(std::pow(N, beta / 2), 1e-15));
    CHECK_THAT(d.high_amplitude, WithinRel(std::pow(N, -beta * (q - 0.5)), 1e-15));
    // Continuum L^2 norm squared: a (A_low^2 + A_high^2), with a = N^-beta.
    const double a = std::pow(N, -beta);
    const double cont = a * (d.low_amplitude * d.low_amplitude + d.high_amplitude * d.high_amplitude);
    const double grid_l2 = l2_norm(d.field);
    const double spacing = g.spacing(0);
    CHECK_THAT(grid_l2 * grid_l2, WithinRel(cont * 4 * spacing / a, 1e-12));
    CHECK_THAT(sobolev_norm(witness_input(d, true), q), WithinRel(1.0, 1e-13));

    const auto ab = build_resonant_datum(N, beta, q, g, WitnessVariant::ablated);
    CHECK(ab.high.hi < 0.0);
    CHECK_THAT(l2_norm(ab.field), WithinRel(grid_l2, 1e-12));
}

TEST_CASE("forcing vanishes in degenerate cases", "[resonance]") {
    const double N = 16, beta = 0.25;
    const auto g = witness_grid(N, beta, small_grid(2));
    const auto d = build_resonant_datum(N, beta, 1.0, g);
    CHECK(l2_norm(duhamel_forcing(d, 0.0, PotentialProfile::gaussian(2, 1.0, 1.0))) == 0.0);
    CHECK(l2_norm(duhamel_forcing(d, 1.0, PotentialProfile::delta(2, 1.0))) < 1e-14);
    CHECK_THROWS_AS(duhamel_forcing(d, -1.0, PotentialProfile::gaussian(2, 1.0, 1.0)), PreconditionError);
}

TEST_CASE("forcing support and quadrature convergence", "[resonance]") {
    const double N = 16, beta = 0.25;
    const auto g = witness_grid(N, beta, small_grid(2));
    const auto d = build_resonant_datum(N, beta, 1.0, g);
    const auto prof = PotentialProfile::gaussian(2, 1.0, 1.0);
    const auto F = duhamel_forcing(d, 1.0, prof);
    double peak = 0.0;
    for (const auto& v : F.values()) peak = std::max(peak, std::abs(v));
    REQUIRE(peak > 0.0);

    // Sums f1 - f2 + f3 of the slab supports.
    const double M = std::pow(N, beta), a = 1.0 / M;
    CHECK(max_outside_support(F, {-M - a, 2 * M + 2 * a}, {-1.0, 2.0}) < 1e-12 * peak);
    CHECK(max_outside_support(F, {0.0, M}, {0.0, 1.0}) > 1e-3 * peak);

    ForcingOptions half;
    DuhamelAccumulator probe(witness_input(d, true), prof, N, beta);
    half.step = probe.step() / 2;
    const auto Fh = duhamel_forcing(d, 1.0, prof, half);
    CHECK(l2_norm(F - Fh) < 0.01 * l2_norm(Fh));

    ForcingOptions bad;
    bad.step = 2 * probe.max_step();
    CHECK_THROWS_AS(duhamel_forcing(d, 1.0, prof, bad), PreconditionError);
}

TEST_CASE("accumulator is restartable", "[resonance]") {
    const double N = 16, beta = 0.25;
    const auto g = witness_grid(N, beta, small_grid(1));
    const auto f = witness_input(build_resonant_datum(N, beta, 1.0, g), true);
    const auto prof = PotentialProfile::gaussian(1, 1.0, 1.0);
    DuhamelAccumulator once(f, prof, N, beta), staged(f, prof, N, beta);
    once.advance_to(1.0);
    for (double t : {0.1, 0.35, 0.35, 0.8, 1.0}) staged.advance_to(t);
    CHECK(l2_norm(once.forcing() - staged.forcing()) < 1e-3 * l2_norm(once.forcing()));
    CHECK_THROWS_AS(staged.advance_to(0.5), PreconditionError);

    // Stage boundaries on the quadrature lattice leave the node set unchanged.
    DuhamelAccumulator whole(f, prof, N, beta), halves(f, prof, N, beta);
    whole.advance_to(2.0);
    halves.advance_to(1.0);
    halves.advance_to(2.0);
    CHECK(l2_norm(whole.forcing() - halves.forcing()) <= 1e-12 * l2_norm(whole.forcing()));
}

TEST_CASE("slab decomposition", "[resonance]") {
    const double N = 64, beta = 0.25;
    const auto g = witness_grid(N, beta, small_grid(1));
    const auto F = duhamel_forcing(build_resonant_datum(N, beta, 1.0, g), 1.0, PotentialProfile::gaussian(1, 1.0, 1.0));
    const auto slabs = slab_decomposition(F, N, beta);
    double total = 0.0;
    for (const auto& s : slabs) total += s.h1_mass;
    const double h1 = sobolev_norm(F, 1.0);
    CHECK_THAT(total, WithinRel(h1 * h1, 1e-12));
    CHECK(mid_slab_dominance(slabs) > 0.0);
}

TEST_CASE("lower bound witness in one dimension", "[resonance]") {
    LowerBoundOptions o;
    o.grid = small_grid(1);
    const auto rep = verify_lower_bound(0.25, 1.0, {16, 32, 64, 128}, o);
    REQUIRE(rep.samples.size() == 4);
    for (const auto& s : rep.samples) {
        CHECK(s.F_h1 > 0.0);
        CHECK_THAT(s.rescaled, WithinRel(std::pow(double(s.N), 0.25) * s.F_h1, 1e-14));
    }
    CHECK(rep.fit.slope < 0.0);
    CHECK_THAT(rep.slope_lo, WithinAbs(-0.2875, 1e-15));
    CHECK_THAT(rep.slope_hi, WithinAbs(-0.2125, 1e-15));
    CHECK_THROWS_AS(verify_lower_bound(0.25, 1.0, {16, 32, 64}, o), PreconditionError);
    CHECK_THROWS_AS(verify_lower_bound(0.25, 1.0, {16, 32, 48, 64}, o), PreconditionError);
}
