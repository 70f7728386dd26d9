#pragma once

// Subcommand dispatch for the nlsrate batch tool. Every run writes a JSON
// manifest next to its CSV tables, including failed runs.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsrate/acceptance.hpp"
#include "nlsrate/boardgame.hpp"
#include "nlsrate/config.hpp"
#include "nlsrate/evolution.hpp"
#include "nlsrate/harness.hpp"
#include "nlsrate/hierarchy.hpp"
#include "nlsrate/potential.hpp"
#include "nlsrate/resonance.hpp"

#ifndef NLSRATE_VERSION
#define NLSRATE_VERSION "0.0.0"
#endif

namespace nlsrate::cli {

inline constexpr const char* output_dir_env = "NLSRATE_OUTPUT_DIR";

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_error = 2 };

struct CheckRecord {
    std::string name;
    bool pass;
    std::string detail;
};

struct Outcome {
    int exit_code = exit_ok;
    std::string error;
    std::vector<CheckRecord> checks;
    std::vector<std::string> files;
};

/// The environment override wins over output.directory when set and non-empty.
inline std::filesystem::path output_directory(const std::string& configured) {
    if (const char* env = std::getenv(output_dir_env); env && *env) return env;
    return configured;
}

namespace detail {

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Best-effort lookup of output.directory in a document that failed validation.
inline std::optional<std::string> scan_directory(const std::string& text) {
    std::stringstream ss(text);
    std::string line, section;
    while (std::getline(ss, line)) {
        if (auto p = line.find_first_of("#;"); p != std::string::npos) line = line.substr(0, p);
        line = nlsrate::detail::trim(line);
        if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
            section = nlsrate::detail::trim(line.substr(1, line.size() - 2));
        } else if (const auto eq = line.find('='); section == "output" && eq != std::string::npos &&
                                                   nlsrate::detail::trim(line.substr(0, eq)) == "directory") {
            auto v = nlsrate::detail::trim(line.substr(eq + 1));
            if (!v.empty()) return v;
        }
    }
    return std::nullopt;
}

class Csv {
public:
    Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : os_(path, std::ios::binary) {
        if (!os_) throw Error("cannot open " + path.string() + " for writing");
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << "\n";
    }

private:
    std::ofstream os_;
};

class Runner {
public:
    Runner(const RunConfig& cfg, std::filesystem::path dir, Outcome& out) : cfg_(cfg), dir_(std::move(dir)), out_(out) {}

    void run() {
        switch (cfg_.subcommand) {
            case Subcommand::solve: solve_cmd(); break;
            case Subcommand::compare: compare_cmd(); break;
            case Subcommand::sweep: sweep_cmd(); break;
            case Subcommand::resonance: resonance_cmd(); break;
            case Subcommand::boardgame: boardgame_cmd(); break;
            case Subcommand::hierarchy: hierarchy_cmd(); break;
            case Subcommand::convrate: convrate_cmd(); break;
        }
    }

private:
    void check(const std::string& name, bool pass, const std::string& detail) {
        out_.checks.push_back({name, pass, detail});
    }

    std::optional<Csv> csv(const std::string& name, const std::vector<std::string>& header) {
        if (!cfg_.csv) return std::nullopt;
        out_.files.push_back(name);
        return std::optional<Csv>(std::in_place, dir_ / name, header);
    }

    void conservation(const std::string& what, double mass, double energy) {
        check(what + " mass drift", mass <= 1e-10, num(mass) + " <= 1e-10");
        check(what + " energy drift", energy <= 1e-6, num(energy) + " <= 1e-6");
    }

    void slope_window(double slope) {
        if (cfg_.slope_min) check("slope >= slope_min", slope >= *cfg_.slope_min, num(slope) + " >= " + num(*cfg_.slope_min));
        if (cfg_.slope_max) check("slope <= slope_max", slope <= *cfg_.slope_max, num(slope) + " <= " + num(*cfg_.slope_max));
    }

    EvolutionSpec evolution_spec(const GridSpec& g) const {
        if (cfg_.equation == Equation::cubic) return EvolutionSpec::cubic(g, cfg_.b0, cfg_.dt, cfg_.T, cfg_.stride);
        return EvolutionSpec::hartree(g, cfg_.make_profile(), static_cast<double>(cfg_.N), cfg_.beta, cfg_.dt, cfg_.T,
                                      cfg_.stride);
    }

    void solve_cmd() {
        const GridSpec g = cfg_.grid();
        const SpectralField data = make_initial_data(cfg_.make_recipe(), g);
        const EvolutionRun run = nlsrate::solve(evolution_spec(g), data);
        if (auto t = csv("solve.csv", {"t", "mass", "energy", "h1norm"}))
            for (const auto& s : run.snapshots) t->row({num(s.t), num(s.mass), num(s.energy), num(s.h1)});
        {
            std::ofstream os(dir_ / "final_state.bin", std::ios::binary);
            if (!os) throw Error("cannot open final_state.bin for writing");
            write_field(os, run.final().field);
            out_.files.push_back("final_state.bin");
        }
        conservation("solve", run.mass_drift(), run.energy_drift());
    }

    void compare_cmd() {
        const GridSpec g = cfg_.grid();
        const SpectralField data = make_initial_data(cfg_.make_recipe(), g);
        const PairResult p = run_pair(data, cfg_.T, cfg_.dt, cfg_.make_profile(), static_cast<double>(cfg_.N),
                                      cfg_.beta, cfg_.stride);
        if (auto t = csv("compare.csv", {"t", "cubic_h1", "hartree_h1", "h1_diff"}))
            for (std::size_t i = 0; i < p.cubic.snapshots.size(); ++i) {
                const auto& a = p.cubic.snapshots[i];
                const auto& b = p.hartree.snapshots[i];
                t->row({num(a.t), num(a.h1), num(b.h1), num(h1_distance(a.field, b.field))});
            }
        conservation("cubic", p.cubic.mass_drift(), p.cubic.energy_drift());
        conservation("hartree", p.hartree.mass_drift(), p.hartree.energy_drift());
    }

    void sweep_cmd() {
        SweepOptions so;
        so.model = cfg_.model;
        so.stride = cfg_.stride;
        so.parallel = cfg_.parallel;
        so.dt_check = cfg_.dt_check;
        so.box_check = cfg_.box_check;
        const SweepReport rep =
            sweep_rate(cfg_.make_recipe(), cfg_.beta, cfg_.N_list, cfg_.T, cfg_.dt, cfg_.make_profile(), cfg_.grid(), so);
        if (auto t = csv("sweep.csv", {"N", "beta", "q", "T", "dt", "supDiff", "mass_drift_max", "energy_drift_max"}))
            for (const auto& r : rep.rows)
                t->row({std::to_string(r.N), num(cfg_.beta), num(cfg_.q), num(cfg_.T), num(cfg_.dt), num(r.sup_diff),
                        num(r.mass_drift), num(r.energy_drift)});
        double mass = 0.0, energy = 0.0;
        for (const auto& r : rep.rows) {
            mass = std::max(mass, r.mass_drift);
            energy = std::max(energy, r.energy_drift);
        }
        conservation("sweep", mass, energy);
        check("slope negative", rep.fit.slope < 0.0, "slope " + num(rep.fit.slope));
        slope_window(rep.fit.slope);
        if (rep.dt_change) check("dt/2 change < 2%", *rep.dt_change < 0.02, num(*rep.dt_change));
        if (rep.box_change) check("box doubling change < 2%", *rep.box_change < 0.02, num(*rep.box_change));
        summary_["slope"] = rep.fit.slope;
        summary_["E0"] = rep.data_h1;
    }

    void resonance_cmd() {
        LowerBoundOptions lo;
        lo.t = cfg_.witness_t;
        lo.variant = cfg_.variant;
        lo.grid.dim = cfg_.dim;
        lo.grid.modes_per_bump = cfg_.modes_per_bump;
        lo.grid.transverse_modes = cfg_.transverse_modes;
        lo.grid.transverse_spacing = cfg_.transverse_spacing;
        lo.forcing.normalize = cfg_.normalize;
        lo.sigma = cfg_.sigma;
        lo.b0 = cfg_.b0;
        const LowerBoundReport rep = verify_lower_bound(cfg_.beta, cfg_.q, cfg_.N_list, lo);
        if (auto t = csv("resonance.csv", {"N", "beta", "q", "F_h1", "rescaled", "slope"}))
            for (const auto& s : rep.samples)
                t->row({std::to_string(s.N), num(cfg_.beta), num(cfg_.q), num(s.F_h1), num(s.rescaled), num(rep.fit.slope)});
        if (cfg_.variant == WitnessVariant::resonant) {
            check("witness slope", rep.slope_ok, num(rep.fit.slope) + " in [" + num(rep.slope_lo) + ", " + num(rep.slope_hi) + "]");
            check("rescaled band <= 2", rep.band_ok, num(rep.band));
        }
        summary_["slope"] = rep.fit.slope;
    }

    void boardgame_cmd() {
        auto t = csv("boardgame.csv", {"k", "j", "admissible_count", "reduced_count", "catalan_bound", "power_bound"});
        bool all = true;
        for (int k = 1; k <= cfg_.board_k_max; ++k)
            for (int j = 1; j <= cfg_.board_j_max; ++j) {
                const BoardgameRow r = verify_boardgame(k, j);
                if (t)
                    t->row({std::to_string(k), std::to_string(j), std::to_string(r.admissible), std::to_string(r.reduced),
                            std::to_string(r.catalan), std::to_string(r.power)});
                if (!r.ok) check("board game (" + std::to_string(k) + ", " + std::to_string(j) + ")", false, "count or bijection mismatch");
                all = all && r.ok;
            }
        check("board game counts", all, "k <= " + std::to_string(cfg_.board_k_max) + ", j <= " + std::to_string(cfg_.board_j_max));
    }

    void hierarchy_cmd() {
        const GridSpec g = cfg_.grid();
        const SpectralField data = make_initial_data(cfg_.make_recipe(), g);
        const PairResult p = run_pair(data, cfg_.T, cfg_.dt, cfg_.make_profile(), static_cast<double>(cfg_.N),
                                      cfg_.beta, cfg_.stride);
        auto t = csv("hierarchy.csv", {"t", "Z", "k_max", "hierarchy_diff", "envelope_bound"});
        bool within = true;
        for (std::size_t i = 0; i < p.cubic.snapshots.size(); ++i) {
            const auto& a = p.cubic.snapshots[i];
            const auto d = hierarchy_difference_master_norm(p.hartree.snapshots[i].field, a.field, cfg_.Z, cfg_.hierarchy_k_max);
            if (t) t->row({num(a.t), num(cfg_.Z), std::to_string(d.k_used), num(d.value), num(d.envelope)});
            within = within && d.value <= d.envelope * (1 + 1e-12) + 1e-300;
        }
        check("hierarchy difference within envelope", within, "all snapshots");
    }

    void convrate_cmd() {
        const GridSpec g = cfg_.grid();
        const SpectralField f = make_initial_data(cfg_.make_recipe(), g);
        const ConvolutionRateReport rep = measure_convolution_rate(cfg_.make_profile(), f, cfg_.s, cfg_.N_list, cfg_.beta);
        if (auto t = csv("convrate.csv", {"N", "value", "slope", "residual"}))
            for (const auto& s : rep.samples) {
                std::string res;
                for (std::size_t i = 0; i < rep.fit.samples.size(); ++i)
                    if (rep.fit.samples[i].N == s.N) res = num(rep.fit.residuals[i]);
                t->row({num(s.N), num(s.value), num(rep.fit.slope), res});
            }
        slope_window(rep.fit.slope);
        summary_["slope"] = rep.fit.slope;
    }

public:
    nlohmann::ordered_json summary_ = nlohmann::ordered_json::object();

private:
    const RunConfig& cfg_;
    std::filesystem::path dir_;
    Outcome& out_;
};

}  // namespace detail

inline void write_manifest(const std::filesystem::path& dir, const RunConfig* cfg, const Outcome& out,
                           double wall_time, const nlohmann::ordered_json& summary) {
    nlohmann::ordered_json m;
    m["tool"] = "nlsrate";
    m["version"] = NLSRATE_VERSION;
    m["fftw"] = std::string(::fftw_version);
    if (cfg) {
        m["subcommand"] = to_string(cfg->subcommand);
        m["seed"] = cfg->seed;
        nlohmann::ordered_json echo = nlohmann::ordered_json::object();
        for (const auto& [k, v] : cfg->echo) echo[k] = v;
        m["config"] = echo;
    }
    m["wall_time_s"] = wall_time;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : out.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    m["checks"] = checks;
    m["summary"] = summary;
    m["outputs"] = out.files;
    m["exit_code"] = out.exit_code;
    m["error"] = out.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(out.error);
    std::ofstream os(dir / "manifest.json", std::ios::binary);
    if (!os) throw Error("cannot write manifest in " + dir.string());
    os << m.dump(2) << "\n";
}

/// Parses `text`, runs it, writes outputs and the manifest. Returns the exit code.
inline int run_document(const std::string& text, std::ostream& log = std::cerr) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    std::optional<RunConfig> cfg;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    std::filesystem::path dir = output_directory(RunConfig{}.directory);
    try {
        cfg = parse_config(text);
        dir = output_directory(cfg->directory);
    } catch (const ConfigError& e) {
        out.exit_code = exit_error;
        out.error = e.what();
        if (auto d = detail::scan_directory(text)) dir = output_directory(*d);
    }
    try {
        std::filesystem::create_directories(dir);
    } catch (const std::exception& e) {
        log << "nlsrate: " << e.what() << "\n";
        return exit_error;
    }
    if (cfg) {
        detail::Runner runner(*cfg, dir, out);
        try {
            runner.run();
            bool ok = true;
            for (const auto& c : out.checks) ok = ok && c.pass;
            out.exit_code = ok ? exit_ok : exit_check_failed;
            if (!ok) out.error = "scientific check failed";
        } catch (const DegenerateSamples& e) {
            out.exit_code = exit_check_failed;
            const std::string what = e.what();
            out.error = what.rfind("degenerate samples", 0) == 0 ? what : "degenerate samples: " + what;
        } catch (const std::exception& e) {
            out.exit_code = exit_error;
            out.error = e.what();
        }
        summary = runner.summary_;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, cfg ? &*cfg : nullptr, out, wall, summary);
    for (const auto& c : out.checks)
        if (!c.pass) log << "check failed: " << c.name << " (" << c.detail << ")\n";
    if (!out.error.empty()) log << "nlsrate: " << out.error << "\n";
    return out.exit_code;
}

inline int run_file(const std::filesystem::path& path, std::ostream& log = std::cerr) {
    std::ifstream is(path);
    if (!is) {
        log << "nlsrate: cannot read " << path.string() << "\n";
        return exit_error;
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return run_document(ss.str(), log);
}

/// Full acceptance suite; exit 1 when any criterion fails.
inline int run_check(std::ostream& os, bool include_3d = true) {
    acceptance::Options opt;
    opt.include_3d = include_3d;
    acceptance::Suite suite(opt);
    const auto results = suite.run(&os);
    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    os << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << "\n";
    return failed ? exit_check_failed : exit_ok;
}

}  // namespace nlsrate::cli
