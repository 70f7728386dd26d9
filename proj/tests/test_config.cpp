#include <catch_amalgamated.hpp>

#include <numbers>

#include "nlsrate/config.hpp"

using namespace nlsrate;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigErrors& e) {
        return e.errors();
    }
    return {};
}

bool has_error(const std::vector<std::string>& errors, const std::string& needle) {
    for (const auto& e : errors)
        if (e.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("minimal sweep document", "[config]") {
    const auto c = parse_config(R"(
[run]
subcommand = sweep
[physics]
N_list = 32, 64, 128, 256
)");
    CHECK(c.subcommand == Subcommand::sweep);
    CHECK(c.N_list == std::vector<std::int64_t>{32, 64, 128, 256});
    CHECK(c.dim == 1);
    CHECK(c.n == std::vector<int>{512});
    CHECK_THAT(c.L[0], WithinRel(16 * std::numbers::pi, 1e-15));
    CHECK(c.beta == 0.2);
    CHECK(c.dt == 1e-3);
    CHECK(c.T == 1.0);
    CHECK(c.recipe == RecipeKind::smooth_random);
    CHECK(c.model == FitModel::pure_power);
    CHECK(c.dt_check);
    CHECK(c.csv);
    CHECK(c.json);
    CHECK(c.echo.size() == 2);
    CHECK(c.echo[1].first == "physics.N_list");
    CHECK(c.grid().dim() == 1);
}

TEST_CASE("pi factors and lists", "[config]") {
    const auto c = parse_config(R"(
[run]
subcommand = solve   # trailing comment
[grid]
dim = 2
n = 64, 32
L = 16pi, 0.5*pi
[data]
mode = 1, -2
)");
    CHECK(c.n == std::vector<int>{64, 32});
    CHECK_THAT(c.L[0], WithinRel(16 * std::numbers::pi, 1e-15));
    CHECK_THAT(c.L[1], WithinRel(0.5 * std::numbers::pi, 1e-15));
    CHECK(c.mode == std::array<int, 3>{1, -2, 0});

    const auto d = parse_config("[run]\nsubcommand = solve\n[grid]\ndim = 3\nn = 16\nL = pi\n");
    CHECK(d.n == std::vector<int>{16, 16, 16});
    CHECK_THAT(d.L[2], WithinRel(std::numbers::pi, 1e-15));
}

TEST_CASE("validation messages", "[config]") {
    CHECK(has_error(errors_of("[run]\nsubcommand = solve\n[physics]\nbeta = 1.5\n"),
                    "physics.beta: 1.500000 is outside the legal interval (0, 1)"));
    CHECK(has_error(errors_of("[run]\nsubcommand = sweep\n[physics]\nN_list = 32, 64, 96, 128\n"),
                    "sweep requires dyadic N_list"));
    CHECK(has_error(errors_of("[run]\nsubcommand = sweep\n[physics]\nN_list = 32, 64\n"), "at least 4 values"));
    CHECK(has_error(errors_of("[run]\nsubcommand = solve\n[grid]\nfoo = 1\n"), "line 4: unknown key grid.foo"));
    CHECK(has_error(errors_of("[run]\nsubcommand = solve\n[time]\ndt = 0.1\ndt = 0.2\n"), "line 5: duplicate key time.dt"));
    CHECK(has_error(errors_of("[grid]\nn = 16\n"), "run.subcommand is required"));
    CHECK(has_error(errors_of("[run]\nsubcommand = fly\n"), "'fly' is not one of"));
    CHECK(has_error(errors_of("[run]\nsubcommand = solve\n[grid]\nn = 15\n"), "positive even"));
    CHECK(has_error(errors_of("[run]\nsubcommand = solve\n[grid]\nL = abc\n"), "expected a real number"));
    CHECK(has_error(errors_of("[run]\nsubcommand = solve\n[grid]\ndealias = maybe\n"), "expected a boolean"));
    CHECK(has_error(errors_of("[run\n"), "malformed section header"));
    CHECK(has_error(errors_of("[run]\nsubcommand\n"), "expected 'key = value'"));
    CHECK(has_error(errors_of("[run]\nsubcommand = boardgame\n[boardgame]\nk_max = 9\n"), "boardgame.k_max"));
    CHECK(has_error(errors_of("[run]\nsubcommand = resonance\n[physics]\nq = 0.5\nN_list = 16, 32, 64, 128\n"),
                    "resonance requires q >= 1"));
    CHECK(has_error(errors_of("[run]\nsubcommand = solve\n[output]\nformats = csv, xml\n"), "unknown format 'xml'"));
}

TEST_CASE("every error is reported", "[config]") {
    const auto e = errors_of("[run]\nsubcommand = solve\n[physics]\nbeta = 2\nsigma = -1\n[time]\ndt = 0\n[x]\ny = 1\n");
    CHECK(e.size() == 4);
    try {
        parse_config("[run]\nsubcommand = solve\n[physics]\nbeta = 2\nsigma = -1\n");
        FAIL("expected ConfigErrors");
    } catch (const ConfigError& err) {
        CHECK_THAT(err.what(), ContainsSubstring("2 configuration error(s)"));
    }
}

TEST_CASE("derived objects", "[config]") {
    const auto c = parse_config(R"(
[run]
subcommand = solve
[physics]
profile = shifted-gaussian
sigma = 0.5
shift = 0.25
[data]
recipe = hq-limited
cutoff = 12
seed = 9
[output]
formats = json
)");
    const auto r = c.make_recipe();
    CHECK(r.kind == RecipeKind::hq_limited);
    REQUIRE(r.cutoff);
    CHECK(*r.cutoff == 12.0);
    CHECK(r.seed == 9);
    CHECK_FALSE(c.csv);
    CHECK(c.json);
    const auto p = c.make_profile();
    CHECK(p.dim() == 1);
}
