#pragma once

// Run configuration: a flat INI-style document.
//
//     [run]       subcommand = solve | compare | sweep | resonance | boardgame | hierarchy | convrate
//     [grid]      dim, n, L, dealias
//     [physics]   equation, beta, N, N_list, profile, b0, sigma, shift, radius, q
//     [time]      T, dt, stride
//     [data]      recipe, seed, amplitude, cutoff, width, mode
//     [output]    directory, formats
//     [sweep]     model, dt_check, box_check, parallel, slope_min, slope_max
//     [resonance] variant, t, modes_per_bump, transverse_modes, transverse_spacing, normalize
//     [boardgame] k_max, j_max
//     [hierarchy] Z, k_max, alpha
//     [convrate]  s
//
// Lists are comma separated. Real values accept a trailing "pi" factor
// ("16pi", "0.5*pi"). Every problem found is reported, not just the first.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlsrate/boardgame.hpp"
#include "nlsrate/error.hpp"
#include "nlsrate/evolution.hpp"
#include "nlsrate/harness.hpp"
#include "nlsrate/potential.hpp"
#include "nlsrate/ratefit.hpp"
#include "nlsrate/resonance.hpp"

namespace nlsrate {

enum class Subcommand { solve, compare, sweep, resonance, boardgame, hierarchy, convrate };

inline const char* to_string(Subcommand s) {
    switch (s) {
        case Subcommand::solve: return "solve";
        case Subcommand::compare: return "compare";
        case Subcommand::sweep: return "sweep";
        case Subcommand::resonance: return "resonance";
        case Subcommand::boardgame: return "boardgame";
        case Subcommand::hierarchy: return "hierarchy";
        case Subcommand::convrate: return "convrate";
    }
    return "?";
}

/// All validation problems of one document.
class ConfigErrors : public ConfigError {
public:
    explicit ConfigErrors(std::vector<std::string> errors)
        : ConfigError(join(errors)), errors_(std::move(errors)) {}
    const std::vector<std::string>& errors() const { return errors_; }

private:
    static std::string join(const std::vector<std::string>& e) {
        std::string s = std::to_string(e.size()) + " configuration error(s):";
        for (const auto& x : e) s += "\n  " + x;
        return s;
    }
    std::vector<std::string> errors_;
};

struct RunConfig {
    Subcommand subcommand = Subcommand::solve;

    int dim = 1;
    std::vector<int> n{512};
    std::vector<double> L{16 * std::numbers::pi};
    bool dealias = true;

    Equation equation = Equation::cubic;
    double beta = 0.2;
    std::int64_t N = 64;
    std::vector<std::int64_t> N_list;
    std::string profile = "gaussian";
    double b0 = 1.0;
    double sigma = 1.0;
    double shift = 0.5;
    double radius = 1.0;
    double q = 1.0;

    double T = 1.0;
    double dt = 1e-3;
    int stride = 10;

    RecipeKind recipe = RecipeKind::smooth_random;
    std::uint64_t seed = 1;
    double amplitude = 0.4;
    std::optional<double> cutoff;
    double width = 1.0;
    std::array<int, 3> mode{0, 0, 0};

    std::string directory = "nlsrate-out";
    bool csv = true;
    bool json = true;

    FitModel model = FitModel::pure_power;
    bool dt_check = true;
    bool box_check = false;
    bool parallel = false;
    std::optional<double> slope_min;
    std::optional<double> slope_max;

    WitnessVariant variant = WitnessVariant::resonant;
    double witness_t = 1.0;
    int modes_per_bump = 4;
    int transverse_modes = 32;
    double transverse_spacing = 0.125;
    bool normalize = true;

    int board_k_max = 6;
    int board_j_max = 6;

    double Z = 10.0;
    int hierarchy_k_max = 1;
    double alpha = 1.0;

    double s = 1.0;

    /// (section.key, value) as written, in document order.
    std::vector<std::pair<std::string, std::string>> echo;

    GridSpec grid() const { return GridSpec(L, n, dealias); }

    PotentialProfile make_profile() const {
        if (profile == "gaussian") return PotentialProfile::gaussian(dim, b0, sigma);
        if (profile == "shifted-gaussian") return PotentialProfile::shifted_gaussian(dim, b0, sigma, shift);
        if (profile == "bump") return PotentialProfile::bump(dim, b0, radius);
        return PotentialProfile::delta(dim, b0);
    }

    DataRecipe make_recipe() const {
        DataRecipe r;
        r.kind = recipe;
        r.q = q;
        r.amplitude = amplitude;
        r.seed = seed;
        r.cutoff = cutoff;
        r.mode = mode;
        r.width = width;
        r.N = static_cast<double>(N);
        r.beta = beta;
        return r;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

class ConfigReader {
public:
    std::vector<std::string> errors;

    std::optional<double> real(const std::string& key, const std::string& v) {
        std::string t = v;
        double factor = 1.0;
        if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
            factor = std::numbers::pi;
            t = trim(t.substr(0, t.size() - 2));
            if (!t.empty() && t.back() == '*') t = trim(t.substr(0, t.size() - 1));
            if (t.empty()) t = "1";
        }
        try {
            std::size_t used = 0;
            const double x = std::stod(t, &used);
            if (used != t.size() || !std::isfinite(x)) throw std::invalid_argument(t);
            return x * factor;
        } catch (const std::exception&) {
            errors.push_back(key + ": expected a real number, got '" + v + "'");
            return std::nullopt;
        }
    }

    std::optional<std::int64_t> integer(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const long long x = std::stoll(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            errors.push_back(key + ": expected an integer, got '" + v + "'");
            return std::nullopt;
        }
    }

    std::optional<bool> boolean(const std::string& key, const std::string& v) {
        if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
        if (v == "false" || v == "no" || v == "off" || v == "0") return false;
        errors.push_back(key + ": expected a boolean, got '" + v + "'");
        return std::nullopt;
    }

    template <typename T>
    std::optional<T> choice(const std::string& key, const std::string& v, const std::map<std::string, T>& options) {
        if (auto it = options.find(v); it != options.end()) return it->second;
        std::string names;
        for (const auto& [name, _] : options) names += (names.empty() ? "" : ", ") + name;
        errors.push_back(key + ": '" + v + "' is not one of {" + names + "}");
        return std::nullopt;
    }
};

}  // namespace detail

/// Parses and validates a configuration document.
inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    detail::ConfigReader rd;
    auto& errors = rd.errors;

    std::map<std::string, std::pair<std::string, int>> entries;
    std::vector<std::string> order;
    {
        std::stringstream ss(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            if (auto p = line.find_first_of("#;"); p != std::string::npos) line = line.substr(0, p);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                    continue;
                }
                section = detail::trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
                continue;
            }
            const std::string key = section + "." + detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (entries.count(key)) {
                errors.push_back("line " + std::to_string(lineno) + ": duplicate key " + key);
                continue;
            }
            entries[key] = {value, lineno};
            order.push_back(key);
            c.echo.emplace_back(key, value);
        }
    }

    static const std::set<std::string> known{
        "run.subcommand",
        "grid.dim", "grid.n", "grid.L", "grid.dealias",
        "physics.equation", "physics.beta", "physics.N", "physics.N_list", "physics.profile", "physics.b0",
        "physics.sigma", "physics.shift", "physics.radius", "physics.q",
        "time.T", "time.dt", "time.stride",
        "data.recipe", "data.seed", "data.amplitude", "data.cutoff", "data.width", "data.mode",
        "output.directory", "output.formats",
        "sweep.model", "sweep.dt_check", "sweep.box_check", "sweep.parallel", "sweep.slope_min", "sweep.slope_max",
        "resonance.variant", "resonance.t", "resonance.modes_per_bump", "resonance.transverse_modes",
        "resonance.transverse_spacing", "resonance.normalize",
        "boardgame.k_max", "boardgame.j_max",
        "hierarchy.Z", "hierarchy.k_max", "hierarchy.alpha",
        "convrate.s"};
    for (const auto& k : order)
        if (!known.count(k)) errors.push_back("line " + std::to_string(entries[k].second) + ": unknown key " + k);

    auto get = [&](const std::string& key) -> std::optional<std::string> {
        if (auto it = entries.find(key); it != entries.end()) return it->second.first;
        return std::nullopt;
    };
    auto set_real = [&](const std::string& key, double& out) {
        if (auto v = get(key))
            if (auto x = rd.real(key, *v)) out = *x;
    };
    auto set_int = [&](const std::string& key, auto& out) {
        if (auto v = get(key))
            if (auto x = rd.integer(key, *v)) out = static_cast<std::remove_reference_t<decltype(out)>>(*x);
    };
    auto set_bool = [&](const std::string& key, bool& out) {
        if (auto v = get(key))
            if (auto x = rd.boolean(key, *v)) out = *x;
    };

    bool have_subcommand = false;
    if (auto v = get("run.subcommand")) {
        if (auto x = rd.choice<Subcommand>("run.subcommand", *v,
                                           {{"solve", Subcommand::solve},
                                            {"compare", Subcommand::compare},
                                            {"sweep", Subcommand::sweep},
                                            {"resonance", Subcommand::resonance},
                                            {"boardgame", Subcommand::boardgame},
                                            {"hierarchy", Subcommand::hierarchy},
                                            {"convrate", Subcommand::convrate}})) {
            c.subcommand = *x;
            have_subcommand = true;
        }
    } else {
        errors.push_back("run.subcommand is required");
    }

    // grid
    set_int("grid.dim", c.dim);
    if (c.dim < 1 || c.dim > 3) errors.push_back("grid.dim: must be 1, 2 or 3, got " + std::to_string(c.dim));
    const int dim = std::clamp(c.dim, 1, 3);
    if (auto v = get("grid.n")) {
        std::vector<int> n;
        for (const auto& item : detail::split_list(*v))
            if (auto x = rd.integer("grid.n", item)) n.push_back(static_cast<int>(*x));
        if (n.size() == 1) n.assign(static_cast<std::size_t>(dim), n[0]);
        c.n = n;
    } else {
        c.n.assign(static_cast<std::size_t>(dim), c.n[0]);
    }
    if (auto v = get("grid.L")) {
        std::vector<double> L;
        for (const auto& item : detail::split_list(*v))
            if (auto x = rd.real("grid.L", item)) L.push_back(*x);
        if (L.size() == 1) L.assign(static_cast<std::size_t>(dim), L[0]);
        c.L = L;
    } else {
        c.L.assign(static_cast<std::size_t>(dim), c.L[0]);
    }
    if (static_cast<int>(c.n.size()) != dim) errors.push_back("grid.n: expected 1 or " + std::to_string(dim) + " values");
    if (static_cast<int>(c.L.size()) != dim) errors.push_back("grid.L: expected 1 or " + std::to_string(dim) + " values");
    for (int x : c.n)
        if (x < 2 || x % 2 != 0) errors.push_back("grid.n: mode counts must be positive even integers, got " + std::to_string(x));
    for (double x : c.L)
        if (!(x > 0.0)) errors.push_back("grid.L: extents must be positive");
    set_bool("grid.dealias", c.dealias);

    // physics
    if (auto v = get("physics.equation"))
        if (auto x = rd.choice<Equation>("physics.equation", *v, {{"cubic", Equation::cubic}, {"hartree", Equation::hartree}}))
            c.equation = *x;
    set_real("physics.beta", c.beta);
    if (!(c.beta > 0.0 && c.beta < 1.0))
        errors.push_back("physics.beta: " + std::to_string(c.beta) + " is outside the legal interval (0, 1)");
    set_int("physics.N", c.N);
    if (c.N < 1) errors.push_back("physics.N: must be >= 1");
    if (auto v = get("physics.N_list")) {
        for (const auto& item : detail::split_list(*v))
            if (auto x = rd.integer("physics.N_list", item)) c.N_list.push_back(*x);
        for (auto x : c.N_list)
            if (x < 1) errors.push_back("physics.N_list: entries must be >= 1");
    }
    if (auto v = get("physics.profile"))
        if (rd.choice<int>("physics.profile", *v, {{"gaussian", 0}, {"shifted-gaussian", 1}, {"bump", 2}, {"delta", 3}}))
            c.profile = *v;
    set_real("physics.b0", c.b0);
    set_real("physics.sigma", c.sigma);
    set_real("physics.shift", c.shift);
    set_real("physics.radius", c.radius);
    set_real("physics.q", c.q);
    if (!(c.sigma > 0.0)) errors.push_back("physics.sigma: must be positive");
    if (!(c.radius > 0.0)) errors.push_back("physics.radius: must be positive");
    if (!(c.q >= 0.0)) errors.push_back("physics.q: must be nonnegative");

    // time
    set_real("time.T", c.T);
    set_real("time.dt", c.dt);
    set_int("time.stride", c.stride);
    if (!(c.T >= 0.0)) errors.push_back("time.T: must be nonnegative");
    if (!(c.dt > 0.0)) errors.push_back("time.dt: must be positive");
    if (c.T > 0.0 && c.dt > c.T) errors.push_back("time.dt: must not exceed time.T");
    if (c.stride < 1) errors.push_back("time.stride: must be >= 1");

    // data
    if (auto v = get("data.recipe"))
        if (auto x = rd.choice<RecipeKind>("data.recipe", *v,
                                           {{"smooth-random", RecipeKind::smooth_random},
                                            {"hq-limited", RecipeKind::hq_limited},
                                            {"single-mode", RecipeKind::single_mode},
                                            {"resonant", RecipeKind::resonant}}))
            c.recipe = *x;
    if (auto v = get("data.seed"))
        if (auto x = rd.integer("data.seed", *v)) {
            if (*x < 0) errors.push_back("data.seed: must be nonnegative");
            c.seed = static_cast<std::uint64_t>(*x);
        }
    set_real("data.amplitude", c.amplitude);
    if (!(c.amplitude >= 0.0)) errors.push_back("data.amplitude: must be nonnegative");
    if (auto v = get("data.cutoff"))
        if (auto x = rd.real("data.cutoff", *v)) {
            if (!(*x > 0.0)) errors.push_back("data.cutoff: must be positive");
            c.cutoff = *x;
        }
    set_real("data.width", c.width);
    if (!(c.width > 0.0)) errors.push_back("data.width: must be positive");
    if (auto v = get("data.mode")) {
        const auto items = detail::split_list(*v);
        if (items.size() > 3) errors.push_back("data.mode: at most 3 indices");
        for (std::size_t i = 0; i < std::min<std::size_t>(3, items.size()); ++i)
            if (auto x = rd.integer("data.mode", items[i])) c.mode[i] = static_cast<int>(*x);
    }

    // output
    if (auto v = get("output.directory")) {
        if (v->empty()) errors.push_back("output.directory: must not be empty");
        c.directory = *v;
    }
    if (auto v = get("output.formats")) {
        c.csv = c.json = false;
        for (const auto& f : detail::split_list(*v)) {
            if (f == "csv")
                c.csv = true;
            else if (f == "json")
                c.json = true;
            else
                errors.push_back("output.formats: unknown format '" + f + "'");
        }
    }

    // sweep
    if (auto v = get("sweep.model"))
        if (auto x = rd.choice<FitModel>("sweep.model", *v,
                                         {{"pure-power", FitModel::pure_power},
                                          {"power-with-loglog", FitModel::power_with_loglog}}))
            c.model = *x;
    set_bool("sweep.dt_check", c.dt_check);
    set_bool("sweep.box_check", c.box_check);
    set_bool("sweep.parallel", c.parallel);
    if (auto v = get("sweep.slope_min"))
        if (auto x = rd.real("sweep.slope_min", *v)) c.slope_min = *x;
    if (auto v = get("sweep.slope_max"))
        if (auto x = rd.real("sweep.slope_max", *v)) c.slope_max = *x;

    // resonance
    if (auto v = get("resonance.variant"))
        if (auto x = rd.choice<WitnessVariant>("resonance.variant", *v,
                                               {{"resonant", WitnessVariant::resonant},
                                                {"ablated", WitnessVariant::ablated}}))
            c.variant = *x;
    set_real("resonance.t", c.witness_t);
    set_int("resonance.modes_per_bump", c.modes_per_bump);
    set_int("resonance.transverse_modes", c.transverse_modes);
    set_real("resonance.transverse_spacing", c.transverse_spacing);
    set_bool("resonance.normalize", c.normalize);
    if (!(c.witness_t >= 0.0)) errors.push_back("resonance.t: must be nonnegative");

    // boardgame
    set_int("boardgame.k_max", c.board_k_max);
    set_int("boardgame.j_max", c.board_j_max);

    // hierarchy
    set_real("hierarchy.Z", c.Z);
    set_int("hierarchy.k_max", c.hierarchy_k_max);
    set_real("hierarchy.alpha", c.alpha);
    if (!(c.Z > 0.0)) errors.push_back("hierarchy.Z: must be positive");
    if (c.hierarchy_k_max < 1) errors.push_back("hierarchy.k_max: must be >= 1");

    // convrate
    set_real("convrate.s", c.s);

    // Per-subcommand consistency.
    if (have_subcommand) {
        const bool needs_list = c.subcommand == Subcommand::sweep || c.subcommand == Subcommand::resonance ||
                                c.subcommand == Subcommand::convrate;
        if (needs_list) {
            if (c.N_list.size() < 4)
                errors.push_back(std::string(to_string(c.subcommand)) + " requires physics.N_list with at least 4 values");
            if (!all_dyadic(c.N_list))
                errors.push_back(std::string(to_string(c.subcommand)) + " requires dyadic N_list");
        }
        if (c.subcommand == Subcommand::boardgame) {
            if (c.board_k_max < 1 || c.board_k_max > boardgame_max_index)
                errors.push_back("boardgame.k_max: must lie in [1, 8]");
            if (c.board_j_max < 1 || c.board_j_max > boardgame_max_index)
                errors.push_back("boardgame.j_max: must lie in [1, 8]");
        }
        if (c.subcommand == Subcommand::convrate && !(c.s >= 0.0 && c.s <= 1.0))
            errors.push_back("convrate.s: must lie in [0, 1]");
        if (c.subcommand == Subcommand::resonance && c.q < 1.0)
            errors.push_back("physics.q: resonance requires q >= 1");
    }

    if (!errors.empty()) throw ConfigErrors(std::move(errors));
    return c;
}

}  // namespace nlsrate
