// config.hpp — scenario configuration for the qosc command-line tool
//
// Configuration is a flat list of `key = value` assignments. Sources are
// merged in order: built-in defaults, scenario preset, config file, then
// `--set` overrides; later sources win. Frequencies are given in any raw unit
// and normalized once, here, by the frequency named in `units`.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qosc/dynamics.hpp"
#include "qosc/model.hpp"
#include "qosc/series.hpp"
#include "qosc/vanvleck.hpp"

namespace qosc::cli {

enum class Units { Omega, omega_ex };

const char* to_string(Units u) noexcept;
Units units_from_string(const std::string& name);

using KeyValues = std::map<std::string, std::string>;

// Every recognized key with its default value.
const KeyValues& default_values();

// Parses `key = value` lines; `#` starts a comment, blank lines are ignored.
// Throws ConfigError on malformed lines, unknown or repeated keys.
KeyValues parse_config_text(const std::string& text, const std::string& source = "<config>");
KeyValues parse_config_file(const std::string& path);

// Parses one `key=value` override.
std::pair<std::string, std::string> parse_assignment(const std::string& text);

// Preset for a named scenario (fig1, fig2, fig3, fig4a, fig4b, fig4c, fig5).
// Throws ConfigError for an unknown name.
KeyValues scenario_preset(const std::string& name);
std::vector<std::string> scenario_names();

struct Sweep {
    std::string variable;  // "eps" or "g"
    double start{0.0};
    double stop{0.0};
    int steps{0};

    double at(int i) const noexcept { return start + (stop - start) * i / (steps - 1); }
};

// Fully resolved and normalized configuration.
struct ScenarioConfig {
    KeyValues values;  // resolved key/value strings, echoed into output metadata
    Units units{Units::Omega};
    double unit_frequency{1.0};  // raw value of the unit frequency

    SystemParams params;  // normalized
    Truncation trunc;
    VanVleckOptions vanvleck;
    Manifold manifold;
    int m_span{4};
    int L_max{2};
    int K_plot{4};
    double theta{10.0};

    std::string sweep_variable{"auto"};  // "auto", "eps" or "g"
    std::optional<double> sweep_start;  // normalized; empty for the command default
    std::optional<double> sweep_stop;
    std::optional<int> sweep_steps;
    std::vector<double> A_values;       // normalized; empty means {params.A}

    bool numeric{true};
    int numeric_k_extra{4};
    double boundary_threshold{0.1};
    int substeps{512};
    double max_leakage{0.05};

    int samples{4096};
    std::optional<double> t_end;  // normalized time; empty for the default grid
    Window window{Window::blackman};
    double peak_weight_threshold{0.02};
    double peak_rel_threshold{0.05};
    int commensurability_denominator{100};
};

// Resolves merged values into a validated configuration. Throws ConfigError
// on unparsable values or inconsistent settings.
ScenarioConfig resolve(const KeyValues& merged);

// Defaults, then preset (if any), then file, then overrides.
KeyValues merge(const std::optional<std::string>& scenario, const std::optional<std::string>& config_path,
                const std::vector<std::string>& overrides);

// Sweep for a command whose axis is `variable`, filling "auto" bounds with
// the given defaults (normalized units).
Sweep resolve_sweep(const ScenarioConfig& config, const std::string& variable, double default_start,
                    double default_stop, int default_steps);

} // namespace qosc::cli
