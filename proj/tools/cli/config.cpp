// config.cpp — key/value parsing, scenario presets and unit normalization

#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qosc/errors.hpp"
#include "qosc/specialfns.hpp"

namespace qosc::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const KeyValues& kv, const std::string& key) {
    const std::string& text = kv.at(key);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || std::isnan(v)) {
        throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
    }
    return v;
}

int parse_int(const KeyValues& kv, const std::string& key) {
    const std::string& text = kv.at(key);
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || v < -1000000 || v > 1000000) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

bool parse_bool(const KeyValues& kv, const std::string& key) {
    const std::string& text = kv.at(key);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

bool is_auto(const KeyValues& kv, const std::string& key) { return kv.at(key) == "auto"; }

std::vector<double> parse_list(const KeyValues& kv, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(kv.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        KeyValues one{{key, trim(item)}};
        out.push_back(parse_double(one, key));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

void check_key(const std::string& key, const std::string& source) {
    if (!default_values().count(key)) {
        throw ConfigError(source + ": unknown key '" + key + "'");
    }
}

} // namespace

const char* to_string(Units u) noexcept { return u == Units::Omega ? "Omega" : "omega_ex"; }

Units units_from_string(const std::string& name) {
    if (name == "Omega") return Units::Omega;
    if (name == "omega_ex") return Units::omega_ex;
    throw ConfigError("unknown units '" + name + "' (Omega, omega_ex)");
}

const KeyValues& default_values() {
    static const KeyValues defaults{
        {"units", "Omega"},
        {"epsilon", "0"},
        {"delta", "0.4"},
        {"g", "0.1"},
        {"Omega", "1"},
        {"A", "8"},
        {"omega_ex", "5.3"},
        {"k_max", "20"},
        {"l_max", "40"},
        {"p_max", "30"},
        {"P_max", "30"},
        {"denom_tol", "auto"},
        {"second_order", "true"},
        {"convention", "spin_locked"},
        {"m", "0"},
        {"L", "0"},
        {"m_span", "4"},
        {"L_max", "2"},
        {"K_plot", "4"},
        {"theta", "10"},
        {"sweep.variable", "auto"},
        {"sweep.start", "auto"},
        {"sweep.stop", "auto"},
        {"sweep.steps", "auto"},
        {"A_values", "auto"},
        {"numeric", "true"},
        {"numeric.k_extra", "4"},
        {"boundary_threshold", "0.1"},
        {"substeps", "512"},
        {"max_leakage", "0.05"},
        {"samples", "4096"},
        {"t_end", "auto"},
        {"window", "blackman"},
        {"peak_weight_threshold", "0.02"},
        {"peak_rel_threshold", "0.05"},
        {"max_denominator", "100"},
    };
    return defaults;
}

KeyValues parse_config_text(const std::string& text, const std::string& source) {
    KeyValues out;
    std::stringstream ss(text);
    std::string line;
    int number = 0;
    while (std::getline(ss, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(number);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(where + ": expected 'key = value'");
        check_key(key, where);
        if (!out.emplace(key, value).second) throw ConfigError(where + ": key '" + key + "' repeated");
    }
    return out;
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + text + "'");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("--set expects key=value, got '" + text + "'");
    check_key(key, "--set");
    return {std::move(key), std::move(value)};
}

std::vector<std::string> scenario_names() { return {"fig1", "fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig5"}; }

KeyValues scenario_preset(const std::string& name) {
    // Driven-qubit parameters shared by the oscillator-unit scenarios.
    const KeyValues base{{"units", "Omega"}, {"Omega", "1"},     {"omega_ex", "5.3"},
                         {"delta", "0.4"},   {"A", "8"},         {"epsilon", "0"},
                         {"m", "0"},         {"L", "0"},         {"second_order", "false"}};
    auto with = [&](KeyValues extra) {
        KeyValues out = base;
        for (auto& [k, v] : extra) out[k] = v;
        return out;
    };
    if (name == "fig1") {
        return {{"units", "omega_ex"},       {"omega_ex", "1"},  {"Omega", format_number(std::sqrt(2.0))},
                {"g", "0.05"},               {"delta", "0.2"},   {"A", "2"},
                {"epsilon", "0"},            {"k_max", "6"},     {"l_max", "16"},
                {"second_order", "true"},    {"L_max", "2"},     {"m_span", "4"},
                {"sweep.variable", "eps"},   {"sweep.start", "0"}, {"sweep.stop", "3"},
                {"sweep.steps", "151"}};
    }
    if (name == "fig2") {
        return with({{"delta", "1"},
                     {"A_values", "8,12.74"},
                     {"k_max", "8"},
                     {"l_max", "12"},
                     {"numeric.k_extra", "8"},
                     {"second_order", "true"},
                     {"sweep.variable", "g"},
                     {"sweep.start", "0"},
                     {"sweep.stop", "1.2"},
                     {"sweep.steps", "121"}});
    }
    if (name == "fig3") {
        return with({{"K_plot", "4"},
                     {"sweep.variable", "g"},
                     {"sweep.start", "0"},
                     {"sweep.stop", "1.5"},
                     {"sweep.steps", "301"}});
    }
    if (name == "fig4a") return with({{"g", "0.1"}, {"theta", "10"}, {"k_max", "10"}});
    if (name == "fig4b") return with({{"g", "0.5"}, {"theta", "10"}, {"k_max", "16"}});
    if (name == "fig4c") return with({{"g", "1"}, {"theta", "10"}, {"k_max", "30"}});
    if (name == "fig5") {
        return with({{"g", "0.5"},
                     {"theta", "10"},
                     {"k_max", "16"},
                     {"A", format_number(special::kBesselJ0FirstZero * 5.3)}});
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

KeyValues merge(const std::optional<std::string>& scenario, const std::optional<std::string>& config_path,
                const std::vector<std::string>& overrides) {
    KeyValues merged = default_values();
    if (scenario) {
        for (auto& [k, v] : scenario_preset(*scenario)) merged[k] = v;
    }
    if (config_path) {
        for (auto& [k, v] : parse_config_file(*config_path)) merged[k] = v;
    }
    for (const std::string& text : overrides) {
        auto [k, v] = parse_assignment(text);
        merged[k] = v;
    }
    return merged;
}

ScenarioConfig resolve(const KeyValues& merged) {
    KeyValues kv = default_values();
    for (auto& [k, v] : merged) {
        check_key(k, "config");
        kv[k] = v;
    }

    ScenarioConfig c;
    c.values = kv;
    c.units = units_from_string(kv.at("units"));

    const double raw_Omega = parse_double(kv, "Omega");
    const double raw_omega = parse_double(kv, "omega_ex");
    c.unit_frequency = c.units == Units::Omega ? raw_Omega : raw_omega;
    if (!(c.unit_frequency > 0.0) || !std::isfinite(c.unit_frequency)) {
        throw ConfigError(std::string("unit frequency ") + to_string(c.units) + " must be positive and finite");
    }
    const double u = c.unit_frequency;

    SystemParams& p = c.params;
    p.epsilon = parse_double(kv, "epsilon") / u;
    p.delta = parse_double(kv, "delta") / u;
    p.g = parse_double(kv, "g") / u;
    p.Omega = raw_Omega / u;
    p.A = parse_double(kv, "A") / u;
    p.omega_ex = raw_omega / u;
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    Truncation& t = c.trunc;
    t.k_max = parse_int(kv, "k_max");
    t.l_max = parse_int(kv, "l_max");
    t.p_max = parse_int(kv, "p_max");
    t.P_max = parse_int(kv, "P_max");
    t.denom_tol = is_auto(kv, "denom_tol") ? Truncation::standard(p).denom_tol : parse_double(kv, "denom_tol") / u;
    try {
        t.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    c.vanvleck.second_order = parse_bool(kv, "second_order");
    const std::string& conv = kv.at("convention");
    if (conv == "spin_locked") {
        c.vanvleck.convention = ShiftConvention::spin_locked;
    } else if (conv == "spin_reversed") {
        c.vanvleck.convention = ShiftConvention::spin_reversed;
    } else {
        throw ConfigError("unknown convention '" + conv + "' (spin_locked, spin_reversed)");
    }

    c.manifold.m = parse_int(kv, "m");
    c.manifold.L = parse_int(kv, "L");
    c.m_span = parse_int(kv, "m_span");
    c.L_max = parse_int(kv, "L_max");
    c.K_plot = parse_int(kv, "K_plot");
    if (c.m_span < 0 || c.L_max < 0 || c.K_plot < 0) throw ConfigError("m_span, L_max and K_plot must be >= 0");
    if (c.L_max > t.k_max) throw ConfigError("L_max must not exceed k_max");

    c.theta = parse_double(kv, "theta");
    if (!(c.theta > 0.0)) throw ConfigError("theta must be > 0");

    c.sweep_variable = kv.at("sweep.variable");
    if (c.sweep_variable != "auto" && c.sweep_variable != "eps" && c.sweep_variable != "g") {
        throw ConfigError("sweep.variable must be auto, eps or g");
    }
    if (!is_auto(kv, "sweep.start")) c.sweep_start = parse_double(kv, "sweep.start") / u;
    if (!is_auto(kv, "sweep.stop")) c.sweep_stop = parse_double(kv, "sweep.stop") / u;
    if (!is_auto(kv, "sweep.steps")) {
        c.sweep_steps = parse_int(kv, "sweep.steps");
        if (*c.sweep_steps < 2) throw ConfigError("sweep.steps must be >= 2");
    }
    if (!is_auto(kv, "A_values")) {
        for (double a : parse_list(kv, "A_values")) {
            if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("A_values must be finite and >= 0");
            c.A_values.push_back(a / u);
        }
    }

    c.numeric = parse_bool(kv, "numeric");
    c.numeric_k_extra = parse_int(kv, "numeric.k_extra");
    if (c.numeric_k_extra < 0) throw ConfigError("numeric.k_extra must be >= 0");
    c.boundary_threshold = parse_double(kv, "boundary_threshold");
    if (!(c.boundary_threshold > 0.0 && c.boundary_threshold <= 1.0)) {
        throw ConfigError("boundary_threshold must lie in (0, 1]");
    }
    c.substeps = parse_int(kv, "substeps");
    if (c.substeps < 1) throw ConfigError("substeps must be >= 1");
    c.max_leakage = parse_double(kv, "max_leakage");
    if (!(c.max_leakage >= 0.0 && c.max_leakage < 1.0)) throw ConfigError("max_leakage must lie in [0, 1)");

    c.samples = parse_int(kv, "samples");
    if (c.samples < 2) throw ConfigError("samples must be >= 2");
    if (!is_auto(kv, "t_end")) {
        const double t_end = parse_double(kv, "t_end") * u;
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive (zero-duration grid)");
        c.t_end = t_end;
    }
    c.window = window_from_string(kv.at("window"));
    c.peak_weight_threshold = parse_double(kv, "peak_weight_threshold");
    c.peak_rel_threshold = parse_double(kv, "peak_rel_threshold");
    if (!(c.peak_weight_threshold >= 0.0) || !(c.peak_rel_threshold >= 0.0)) {
        throw ConfigError("peak thresholds must be >= 0");
    }
    c.commensurability_denominator = parse_int(kv, "max_denominator");
    if (c.commensurability_denominator < 1) throw ConfigError("max_denominator must be >= 1");
    return c;
}

Sweep resolve_sweep(const ScenarioConfig& config, const std::string& variable, double default_start,
                    double default_stop, int default_steps) {
    if (config.sweep_variable != "auto" && config.sweep_variable != variable) {
        throw ConfigError("this command sweeps '" + variable + "', but sweep.variable = " + config.sweep_variable);
    }
    Sweep s;
    s.variable = variable;
    s.start = config.sweep_start.value_or(default_start);
    s.stop = config.sweep_stop.value_or(default_stop);
    s.steps = config.sweep_steps.value_or(default_steps);
    if (!std::isfinite(s.start) || !std::isfinite(s.stop) || !(s.stop > s.start)) {
        throw ConfigError("sweep bounds must be finite with start < stop");
    }
    if (variable == "g" && s.start < 0.0) throw ConfigError("a g sweep must start at g >= 0");
    return s;
}

} // namespace qosc::cli
