#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nlsrate/hierarchy.hpp"

using namespace nlsrate;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GridSpec small() { return GridSpec({2 * std::numbers::pi}, {8}); }

SpectralField random_state(std::uint64_t seed, double h1 = 1.0) {
    const auto g = small();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    SpectralField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = Complex(n(rng), n(rng));
    f *= h1 / sobolev_norm(f, 1.0);
    return f;
}

SpectralField unit_mode(std::size_t i) {
    SpectralField f(small());
    f[i] = 1.0;
    f *= 1.0 / sobolev_norm(f, 1.0);
    return f;
}

// ||<grad>^{(x) 2k} (gamma_a - gamma_b)||_2 from the explicit 2k-variable Fourier kernels.
double kernel_difference(const SpectralField& pa, const SpectralField& pb, int k) {
    const auto& g = pa.grid();
    const std::size_t n = g.size();
    std::vector<Complex> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::sqrt(1.0 + norm2(g.wavevector(i)));
        u[i] = w * pa[i];
        v[i] = w * pb[i];
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(2 * k), 0);
    double acc = 0.0;
    for (;;) {
        Complex ka = 1.0, kb = 1.0;
        for (int l = 0; l < k; ++l) {
            ka *= u[idx[l]] * std::conj(u[idx[k + l]]);
            kb *= v[idx[l]] * std::conj(v[idx[k + l]]);
        }
        acc += std::norm(ka - kb);
        std::size_t p = 0;
        while (p < idx.size() && ++idx[p] == n) idx[p++] = 0;
        if (p == idx.size()) break;
    }
    return std::sqrt(acc);
}

}  // namespace

TEST_CASE("level norms of product states", "[hierarchy]") {
    const auto phi = random_state(1, 1.3);
    for (int k : {1, 2, 3}) CHECK_THAT(tensor_level_norm(phi, 1.0, k), WithinRel(std::pow(1.3, 2 * k), 1e-14));
    CHECK_THROWS_AS(tensor_level_norm(phi, 1.0, 0), PreconditionError);
}

TEST_CASE("difference norm against explicit kernels", "[hierarchy]") {
    const auto a = random_state(2, 1.1);
    const auto b = random_state(3, 0.8);
    for (int k : {1, 2, 3}) CHECK_THAT(tensor_difference_norm(a, b, k), WithinRel(kernel_difference(a, b, k), 1e-10));

    // Nearby states, where a^{2k} + b^{2k} - 2|c|^{2k} would cancel.
    SpectralField c = a;
    c[2] += Complex(1e-7, -2e-7);
    for (int k : {1, 2}) CHECK_THAT(tensor_difference_norm(a, c, k), WithinRel(kernel_difference(a, c, k), 1e-6));

    CHECK(tensor_difference_norm(a, a, 2) == 0.0);
    CHECK_THAT(tensor_difference_norm(unit_mode(1), unit_mode(2), 1), WithinRel(std::sqrt(2.0), 1e-14));
    CHECK_THAT(tensor_difference_norm(a, SpectralField(small()), 2), WithinRel(std::pow(1.1, 4), 1e-14));
    // A global phase leaves the kernel unchanged.
    SpectralField rotated = a;
    rotated *= std::polar(1.0, 0.7);
    CHECK(tensor_difference_norm(a, rotated, 3) < 1e-12);
    CHECK_THROWS_AS(tensor_difference_norm(a, SpectralField(GridSpec({2 * std::numbers::pi}, {16})), 1), GridMismatch);
}

TEST_CASE("binomial bound", "[hierarchy]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_state(100 + i, u(rng));
        const auto b = random_state(900 + i, u(rng));
        for (int k = 1; k <= 5; ++k) CHECK(binomial_bound_check(a, b, k, 1.0).pass);
    }
    const auto r = binomial_bound_check(random_state(7, 1.5), random_state(8, 1.9), 3, 2.0);
    CHECK(r.pass);
    CHECK_THAT(r.rhs, WithinRel(6 * std::pow(6.0, 5) * h1_distance(random_state(7, 1.5), random_state(8, 1.9)), 1e-14));
    CHECK_THROWS_AS(binomial_bound_check(random_state(7, 1.5), random_state(8, 1.9), 3, 1.0), HypothesisViolation);
}

TEST_CASE("factorized master norm", "[hierarchy]") {
    const auto phi = random_state(4);
    CHECK_THAT(master_norm_factorized(phi, 1.0, 2.0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(master_norm_factorized(phi, 1.0, 4.0), WithinAbs(1.0 / 3.0, 1e-14));
    // Partial sums of the defining series.
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) s += std::pow(3.0, -k) * tensor_level_norm(phi, 1.0, k);
    CHECK_THAT(master_norm_factorized(phi, 1.0, 3.0), WithinAbs(s, 1e-12));
    CHECK_THROWS_AS(master_norm_factorized(phi, 1.0, 1.0), DivergenceError);
    CHECK_THROWS_AS(master_norm_factorized(phi, 1.0, 0.0), PreconditionError);
}

TEST_CASE("master-norm difference", "[hierarchy]") {
    const auto a = random_state(10, 0.9);
    const auto b = random_state(11, 1.0);
    const auto d = hierarchy_difference_master_norm(a, b, 20.0);
    CHECK_THAT(d.C, WithinRel(1.0, 1e-14));
    double s = 0.0;
    for (int k = 1; k <= 400; ++k) s += std::pow(20.0, -k) * tensor_difference_norm(a, b, k);
    CHECK_THAT(d.value, WithinRel(s, 1e-12));
    CHECK(d.value <= d.envelope);
    CHECK(d.tail_bound <= 1e-12 * d.value);

    const auto longer = hierarchy_difference_master_norm(a, b, 20.0, 2 * d.k_used);
    CHECK(longer.k_used == 2 * d.k_used);
    CHECK(std::abs(longer.value - d.value) < 1e-12 * d.value);

    const auto same = hierarchy_difference_master_norm(a, a, 20.0);
    CHECK(same.value == 0.0);
    CHECK(same.envelope == 0.0);
    CHECK_THROWS_AS(hierarchy_difference_master_norm(a, b, 9.0), DivergenceError);
}

TEST_CASE("mixtures", "[hierarchy]") {
    const std::vector<SpectralField> states{unit_mode(1), unit_mode(3)};
    const std::vector<double> w{0.5, 0.5};
    for (int k : {1, 2, 5}) CHECK_THAT(mixture_level_norm(states, w, 1.0, k), WithinRel(std::sqrt(0.5), 1e-14));
    CHECK_THAT(mixture_master_norm(states, w, 1.0, 3.0), WithinRel(std::sqrt(0.5) / 2.0, 1e-11));

    // A one-state mixture is the product state.
    const auto phi = random_state(12, 0.7);
    CHECK_THAT(mixture_level_norm({phi}, {1.0}, 1.0, 3), WithinRel(tensor_level_norm(phi, 1.0, 3), 1e-13));
    CHECK_THAT(mixture_master_norm({phi}, {1.0}, 1.0, 2.0), WithinRel(master_norm_factorized(phi, 1.0, 2.0), 1e-11));

    CHECK_THROWS_AS(mixture_level_norm(states, {0.5, 0.6}, 1.0, 1), PreconditionError);
    CHECK_THROWS_AS(mixture_level_norm(states, {1.5, -0.5}, 1.0, 1), PreconditionError);
    CHECK_THROWS_AS(mixture_level_norm(states, {1.0}, 1.0, 1), PreconditionError);
    CHECK_THROWS_AS(mixture_master_norm(states, w, 1.0, 1.0), DivergenceError);
}
