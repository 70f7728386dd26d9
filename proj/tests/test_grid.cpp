#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <cstring>

#include "nlsrate/grid.hpp"

using namespace nlsrate;
using Catch::Matchers::WithinAbs;

namespace {

SpectralField random_spectral(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    SpectralField f(g);
    for (auto& c : f.coefficients()) c = Complex(n(rng), n(rng));
    return f;
}

// c_k = sqrt(V)/n * sum_x u(x) e^{-i k x}, straight from the definition.
Complex naive_coefficient(const PhysicalField& u, const Wavevector& k) {
    const GridSpec& g = u.grid();
    Complex acc = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < g.modes(0); ++i)
        for (int j = 0; j < g.modes(1); ++j)
            for (int l = 0; l < g.modes(2); ++l) {
                const double phase = k[0] * g.coordinate(0, i) + (g.dim() > 1 ? k[1] * g.coordinate(1, j) : 0.0) +
                                     (g.dim() > 2 ? k[2] * g.coordinate(2, l) : 0.0);
                acc += u[idx++] * std::polar(1.0, -phase);
            }
    return acc * std::sqrt(g.volume()) / static_cast<double>(g.size());
}

}  // namespace

TEST_CASE("grid geometry", "[grid]") {
    const auto g = GridSpec({2 * std::numbers::pi, 4 * std::numbers::pi}, {8, 4});
    CHECK(g.dim() == 2);
    CHECK(g.size() == 32);
    CHECK_THAT(g.volume(), WithinAbs(8 * std::numbers::pi * std::numbers::pi, 1e-12));
    CHECK_THAT(g.spacing(1), WithinAbs(0.5, 1e-15));
    CHECK(g.signed_index(0, 5) == -3);
    CHECK(g.storage_index(0, -3) == 5);
    CHECK_THAT(g.max_wavenumber(0), WithinAbs(4.0, 1e-15));
    CHECK_THAT(g.min_max_wavenumber(), WithinAbs(1.0, 1e-15));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto m = g.unflatten(i);
        CHECK(g.flat(m[0], m[1], m[2]) == i);
    }
    const auto big = g.doubled_box();
    CHECK(big.modes(0) == 16);
    CHECK_THAT(big.spacing(0), WithinAbs(0.5 * g.spacing(0), 1e-15));
    CHECK_THAT(big.max_wavenumber(0), WithinAbs(g.max_wavenumber(0), 1e-15));
}

TEST_CASE("grid rejects bad shapes", "[grid]") {
    CHECK_THROWS_AS(GridSpec({1.0}, {7}), PreconditionError);
    CHECK_THROWS_AS(GridSpec({-1.0}, {8}), PreconditionError);
    CHECK_THROWS_AS(GridSpec({1.0, 1.0}, {8}), PreconditionError);
    CHECK_THROWS_AS(GridSpec({1.0, 1.0, 1.0, 1.0}, {2, 2, 2, 2}), PreconditionError);
}

TEST_CASE("constant field has a single zero-mode coefficient", "[grid][transform]") {
    const auto g = GridSpec::cube(1, 1.0, 16);
    PhysicalField u(g);
    for (auto& x : u.storage()) x = Complex(0.3, -1.2);
    const auto c = transform_forward(u);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Complex expect = i == 0 ? Complex(0.3, -1.2) : Complex(0.0);
        CHECK(std::abs(c[i] - expect) < 1e-14);
    }
}

TEST_CASE("plane wave lands on its mode", "[grid][transform]") {
    const auto g = GridSpec::cube(3, 2 * std::numbers::pi, 8);
    const auto u = sample(g, [](const std::array<double, 3>& x) { return std::polar(1.0, 2 * x[0] - x[1] + 3 * x[2]); });
    const auto c = transform_forward(u);
    const auto target = g.flat(g.storage_index(0, 2), g.storage_index(1, -1), g.storage_index(2, 3));
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double expect = i == target ? std::sqrt(g.volume()) : 0.0;
        CHECK(std::abs(c[i] - expect) < 1e-11);
    }
}

TEST_CASE("transform matches a naive DFT", "[grid][transform]") {
    for (int d = 1; d <= 3; ++d) {
        const auto g = GridSpec(std::vector<double>(d, 3.0), std::vector<int>(d, d == 1 ? 12 : 6));
        const auto f = random_spectral(g, 10 + d);
        const auto u = transform_inverse(f);
        for (std::size_t i = 0; i < g.size(); i += 3) CHECK(std::abs(naive_coefficient(u, g.wavevector(i)) - f[i]) < 1e-11);
    }
}

TEST_CASE("round trip and Parseval", "[grid][transform]") {
    const auto g = GridSpec({5.0, 7.0}, {16, 10});
    const auto f = random_spectral(g, 3);
    const auto u = transform_inverse(f);
    const auto back = transform_forward(u);
    double spec = 0.0, phys = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(std::abs(back[i] - f[i]) < 1e-12);
        spec += std::norm(f[i]);
        phys += std::norm(u[i]);
    }
    CHECK_THAT(phys * g.volume() / static_cast<double>(g.size()), WithinAbs(spec, 1e-9));
}

TEST_CASE("multipliers", "[grid][multiplier]") {
    const auto g = GridSpec::cube(2, 2 * std::numbers::pi, 8);
    const auto f = random_spectral(g, 4);

    const auto same = apply_multiplier(f, [](const Wavevector&) { return Complex(1.0); });
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

    const double t = 0.7;
    auto there = apply_multiplier(f, [&](const Wavevector& k) { return std::polar(1.0, -t * norm2(k)); });
    const auto back = apply_multiplier(there, [&](const Wavevector& k) { return std::polar(1.0, t * norm2(k)); });
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-12);

    const auto zero = single_mode(g, {0, 0, 0}, Complex(2.5, 1.0));
    const auto bessel = apply_multiplier(zero, [](const Wavevector& k) { return Complex(std::sqrt(1 + norm2(k))); });
    CHECK(bessel[0] == Complex(2.5, 1.0));

    CHECK_THROWS_AS(apply_multiplier(f, [](const Wavevector& k) { return Complex(1.0 / norm2(k)); }), NonFiniteValue);
    std::vector<Complex> short_table(3);
    CHECK_THROWS_AS(apply_multiplier(f, std::span<const Complex>(short_table)), GridMismatch);
}

TEST_CASE("pointwise products", "[grid][product]") {
    const auto g = GridSpec::cube(1, 2 * std::numbers::pi, 16);
    const double s = std::sqrt(g.volume());
    const auto a = single_mode(g, {3, 0, 0}, s);
    const auto b = single_mode(g, {-5, 0, 0}, s);

    const auto one = single_mode(g, {0, 0, 0}, s);
    const auto id = pointwise_product(one, b);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(id[i] - b[i]) < 1e-12);

    const auto ab = pointwise_product(a, b);
    const auto expect = single_mode(g, {-2, 0, 0}, s);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(ab[i] - expect[i]) < 1e-12);

    SpectralField conj_a = single_mode(g, {-3, 0, 0}, s);
    const auto density = pointwise_product(a, conj_a);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(density[i] - one[i]) < 1e-12);

    CHECK_THROWS_AS(pointwise_product(a, SpectralField(GridSpec::cube(1, 2 * std::numbers::pi, 8))), GridMismatch);
}

TEST_CASE("dealiasing band", "[grid][dealias]") {
    const auto g = GridSpec::cube(1, 2 * std::numbers::pi, 12, true);
    // 2/3 of the Nyquist index 6 keeps |m| <= 4.
    CHECK(g.retained(g.flat(g.storage_index(0, 4))));
    CHECK_FALSE(g.retained(g.flat(g.storage_index(0, 5))));
    const double s = std::sqrt(g.volume());
    const auto a = single_mode(g, {3, 0, 0}, s);
    const auto aa = pointwise_product(a, a);  // mode 6 aliases and is dropped
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(aa[i]) < 1e-12);
}

TEST_CASE("serialization round trip", "[grid][io]") {
    const auto g = GridSpec({3.0, 2.0}, {4, 6});
    const auto f = random_spectral(g, 9);
    std::stringstream ss;
    write_field(ss, f);
    const std::string bytes = ss.str();
    CHECK(bytes.size() == 8 + 2 * 8 + 2 * 8 + g.size() * 16);
    const auto back = read_field(ss);
    REQUIRE(back.grid() == g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back[i] == f[i]);

    // First stored coefficient is the most negative mode on every axis.
    double re = 0.0;
    std::memcpy(&re, bytes.data() + 40, 8);
    CHECK(re == f.at_mode(-2, -3, 0).real());

    std::stringstream truncated(bytes.substr(0, 30));
    CHECK_THROWS_AS(read_field(truncated), Error);
}
