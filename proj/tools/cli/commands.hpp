// commands.hpp — subcommands of the qosc command-line tool
//
// Each command builds its tables in memory; run_command writes them. Sweep
// points are evaluated on up to `jobs` threads and emitted in sweep order.

#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "csv.hpp"

namespace qosc::cli {

struct RunOptions {
    std::string command;
    std::string out;   // output path, "-" for stdout
    int jobs{1};
    std::string build_id{"unknown"};
};

// Warnings attached to every output: commensurability of Omega/omega_ex and
// whether the perturbative cutoffs reach the degenerate order.
std::vector<std::string> config_warnings(const ScenarioConfig& config);

// Folds a quasienergy into [-omega_ex/2, omega_ex/2).
double fold(double value, double omega_ex);

// Resonance (m, L), |m| <= m_span, |L| <= L_max, with the smallest detuning;
// ties prefer small |L|, then L >= 0.
ResonanceIndex nearest_doublet(const SystemParams& params, int m_span, int L_max);

// 2 (k_max + 1) folded, ascending analytic quasienergies for the (m, L)
// doublet family at n = 0: block eigenvalues, uncoupled spin-down states and
// spin-up states whose partner lies beyond k_max.
std::vector<double> analytic_levels(const SystemParams& params, const Truncation& trunc, int m, int L,
                                    const VanVleckOptions& options);

// Folded Delta = 0 reference levels for K <= k_max, ascending.
std::vector<double> reference_levels(const SystemParams& params, int k_max);

// Folded Sambe quasienergies of the `count` interior states with the lowest
// mean oscillator occupation, ascending; NaN-padded.
std::vector<double> numeric_levels(const SystemParams& params, const Truncation& trunc, double boundary_threshold,
                                   int count);

CsvTable spectrum_eps_table(const ScenarioConfig& config, const RunOptions& run);
CsvTable spectrum_g_table(const ScenarioConfig& config, const RunOptions& run);
CsvTable gaps_table(const ScenarioConfig& config, const RunOptions& run);

struct DynamicsTables {
    CsvTable series{{}};
    CsvTable spectrum{{}};
};
DynamicsTables dynamics_tables(const ScenarioConfig& config, const RunOptions& run);

std::string validate_report(const ScenarioConfig& config);

// Positive roots of L_K^{(L)}(alpha) with alpha <= alpha_max, ascending.
std::vector<double> laguerre_roots(int K, int L, double alpha_max);

// Adds schema, command, build id, units, config echo and warnings.
void add_metadata(CsvTable& table, const ScenarioConfig& config, const RunOptions& run);

// Runs one command and writes its output; dynamics writes `<out>` and
// `<stem>_spectrum.csv`.
void run_command(const ScenarioConfig& config, const RunOptions& run);

// Path of the spectrum file belonging to a dynamics output path.
std::string spectrum_path(const std::string& out);

} // namespace qosc::cli
