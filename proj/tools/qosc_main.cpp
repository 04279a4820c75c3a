// qosc_main.cpp — command-line entry point
//
// Exit codes: 0 success, 2 configuration error, 3 numeric or convergence
// error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "qosc/errors.hpp"

#ifndef QOSC_BUILD_ID
#define QOSC_BUILD_ID "unknown"
#endif

namespace {

struct Flags {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out;
    int jobs{1};
    std::string units;
    std::string scenario;
};

void add_common_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_path, "flat key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", flags.sets, "override one key, key=value (repeatable)")->take_all();
    cmd->add_option("--out", flags.out, "output path, '-' for stdout");
    cmd->add_option("--jobs", flags.jobs, "sweep points evaluated concurrently")->check(CLI::PositiveNumber);
    cmd->add_option("--units", flags.units, "unit frequency")->check(CLI::IsMember({"Omega", "omega_ex"}));
    cmd->add_option("--scenario", flags.scenario, "preset: fig1 fig2 fig3 fig4a fig4b fig4c fig5")
        ->check(CLI::IsMember(qosc::cli::scenario_names()));
}

// Relative default paths go to QOSC_OUT_DIR when it is set.
std::string default_out(const std::string& command) {
    std::filesystem::path path = command + ".csv";
    if (const char* dir = std::getenv("QOSC_OUT_DIR"); dir && *dir) path = std::filesystem::path(dir) / path;
    return path.string();
}

int run(const std::string& command, const Flags& flags) {
    using namespace qosc::cli;
    std::vector<std::string> overrides = flags.sets;
    if (!flags.units.empty()) overrides.push_back("units=" + flags.units);
    const auto merged = merge(flags.scenario.empty() ? std::nullopt : std::optional(flags.scenario),
                              flags.config_path.empty() ? std::nullopt : std::optional(flags.config_path), overrides);
    const ScenarioConfig config = resolve(merged);
    for (const std::string& w : config_warnings(config)) std::cerr << "warning: " << w << '\n';

    if (command == "validate") {
        const std::string report = validate_report(config);
        if (flags.out.empty() || flags.out == "-") {
            std::cout << report;
        } else {
            std::ofstream out(flags.out);
            if (!out) throw qosc::ConfigError("cannot open output file '" + flags.out + "'");
            out << report;
        }
        return 0;
    }
    RunOptions opts;
    opts.command = command;
    opts.out = flags.out.empty() ? default_out(command) : flags.out;
    opts.jobs = flags.jobs;
    opts.build_id = QOSC_BUILD_ID;
    run_command(config, opts);
    if (opts.out != "-") std::cerr << "wrote " << opts.out << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qosc: driven qubit-oscillator quasienergies and dynamics"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"spectrum-eps", "quasienergies against the static bias"},
        {"spectrum-g", "quasienergies against the coupling strength"},
        {"gaps", "avoided-crossing widths against the coupling strength"},
        {"dynamics", "survival probability and its Fourier spectrum"},
        {"validate", "unit, commensurability and convergence report"},
    };
    for (const auto& [name, help] : commands) add_common_flags(app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, flags);
    } catch (const qosc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qosc::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qosc::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    }
}
