#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dispatch.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Rate studies for the cubic and Hartree NLS"};
    app.set_version_flag("--version", std::string("nlsrate ") + NLSRATE_VERSION);
    std::string config;
    bool check = false;
    bool skip_3d = false;
    app.add_option("config", config, "Run configuration (INI)");
    app.add_flag("--check", check, "Run the acceptance suite");
    app.add_flag("--skip-3d", skip_3d, "With --check: skip the 3D confirmation run");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : nlsrate::cli::exit_error;
    }
    if (check) return nlsrate::cli::run_check(std::cout, !skip_3d);
    if (config.empty()) {
        std::cerr << "nlsrate: a config file or --check is required\n" << app.help();
        return nlsrate::cli::exit_error;
    }
    return nlsrate::cli::run_file(config);
}
