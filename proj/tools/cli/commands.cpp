// commands.cpp — spectrum sweeps, gap curves, dynamics and validation

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "qosc/dynamics.hpp"
#include "qosc/errors.hpp"
#include "qosc/floquet_numeric.hpp"
#include "qosc/specialfns.hpp"
#include "qosc/vanvleck.hpp"

namespace qosc::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// Runs body(i) for i in [0, n) on up to `jobs` threads. The exception of the
// lowest failing index is rethrown after all workers finish.
template <class Body>
void parallel_for(int n, int jobs, Body&& body) {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, std::min(jobs, n));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct Normalized {
    SystemParams params;
    int m{0};
    int L{0};
};

// Maps an L < 0 family onto the spin-exchanged problem, which has the same
// quasienergies and gaps.
Normalized normalized_family(const SystemParams& params, int m, int L) {
    if (L >= 0) return {params, m, L};
    return {flip_spin(params), -m, -L};
}

void append(std::vector<std::string>& cells, const std::vector<double>& values) {
    for (double v : values) cells.push_back(format_double(v));
}

void add_level_columns(std::vector<std::string>& cols, const char* prefix, int count) {
    for (int i = 0; i < count; ++i) cols.push_back(std::string(prefix) + "_" + std::to_string(i));
}

std::vector<std::string> spectrum_columns(const ScenarioConfig& config, std::vector<std::string> leading) {
    const int n = 2 * (config.trunc.k_max + 1);
    leading.push_back("m");
    leading.push_back("L");
    add_level_columns(leading, "analytic", n);
    if (config.numeric) add_level_columns(leading, "numeric", n);
    add_level_columns(leading, "reference", n);
    return leading;
}

Truncation numeric_truncation(const ScenarioConfig& config) {
    Truncation t = config.trunc;
    t.k_max += config.numeric_k_extra;
    return t;
}

std::vector<std::string> spectrum_cells(const ScenarioConfig& config, const SystemParams& p) {
    const int n = 2 * (config.trunc.k_max + 1);
    const ResonanceIndex idx = nearest_doublet(p, config.m_span, config.L_max);
    std::vector<std::string> cells{std::to_string(idx.m), std::to_string(idx.L)};
    append(cells, analytic_levels(p, config.trunc, idx.m, idx.L, config.vanvleck));
    if (config.numeric) append(cells, numeric_levels(p, numeric_truncation(config), config.boundary_threshold, n));
    append(cells, reference_levels(p, config.trunc.k_max));
    return cells;
}

std::string units_description(const ScenarioConfig& config) {
    const char* u = to_string(config.units);
    return fmt("%s (frequencies divided by %s = %.17g raw, times multiplied by it)", u, u, config.unit_frequency);
}

std::string params_line(const SystemParams& p) {
    return fmt("epsilon=%.17g delta=%.17g g=%.17g Omega=%.17g A=%.17g omega_ex=%.17g", p.epsilon, p.delta, p.g,
               p.Omega, p.A, p.omega_ex);
}

std::string truncation_line(const Truncation& t) {
    return fmt("k_max=%d l_max=%d p_max=%d P_max=%d denom_tol=%.17g", t.k_max, t.l_max, t.p_max, t.P_max,
               t.denom_tol);
}

// Largest |a - b| over the levels of `base`, each matched to the nearest level
// of `other` modulo omega_ex.
double max_level_delta(const std::vector<double>& base, const std::vector<double>& other, double omega_ex) {
    double worst = 0.0;
    for (double a : base) {
        if (std::isnan(a)) continue;
        double best = std::numeric_limits<double>::infinity();
        for (double b : other) {
            if (!std::isnan(b)) best = std::min(best, std::abs(fold(a - b, omega_ex)));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

std::vector<std::string> config_warnings(const ScenarioConfig& config) {
    std::vector<std::string> out;
    const SystemParams& p = config.params;
    const auto c = commensurability_check(p.Omega, p.omega_ex, config.commensurability_denominator);
    if (!c) return out;
    const auto [j, N] = *c;
    out.push_back(fmt("Omega/omega_ex = %d/%d is commensurable: %d drive photons match %d oscillator quanta, so "
                      "infinitely many states are degenerate; only processes of order >= %d are affected",
                      j, N, j, N, std::min(j, N)));
    const Truncation& t = config.trunc;
    if (t.p_max >= j && t.P_max >= N) {
        out.push_back(fmt("second-order cutoffs p_max=%d, P_max=%d reach the degenerate order (%d, %d); expect "
                          "small-denominator failures",
                          t.p_max, t.P_max, j, N));
    }
    if (config.numeric && t.l_max >= j && t.k_max + config.numeric_k_extra >= N) {
        out.push_back(fmt("numeric Sambe cutoffs l_max=%d, k_max=%d contain the degenerate order (%d, %d)", t.l_max,
                          t.k_max + config.numeric_k_extra, j, N));
    }
    return out;
}

double fold(double value, double omega_ex) { return value - omega_ex * std::floor((value + 0.5 * omega_ex) / omega_ex); }

ResonanceIndex nearest_doublet(const SystemParams& params, int m_span, int L_max) {
    ResonanceIndex best;
    double best_abs = std::numeric_limits<double>::infinity();
    // Visit |L| ascending, L >= 0 first, so ties keep the simpler family.
    for (int a = 0; a <= L_max; ++a) {
        for (int L : {a, -a}) {
            if (a == 0 && L < 0) continue;
            for (int m = -m_span; m <= m_span; ++m) {
                const double d = std::abs(resonance_detuning(params, m, L));
                if (d < best_abs) {
                    best_abs = d;
                    best = {m, L, 0, 0};
                }
            }
        }
    }
    return best;
}

std::vector<double> analytic_levels(const SystemParams& params, const Truncation& trunc, int m, int L,
                                    const VanVleckOptions& options) {
    const Normalized f = normalized_family(params, m, L);
    if (f.L > trunc.k_max) throw ConfigError("analytic_levels: |L| exceeds k_max");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * (trunc.k_max + 1)));
    for (int K = 0; K <= trunc.k_max; ++K) {
        const ResonanceIndex idx{f.m, f.L, 0, K};
        if (K + f.L <= trunc.k_max) {
            const auto [lo, hi] = quasienergies(idx, f.params, trunc, options);
            out.push_back(lo.value);
            out.push_back(hi.value);
        } else {
            out.push_back(effective_block(idx, f.params, trunc, options).e_up);
        }
    }
    for (const QuasienergyLevel& level : uncoupled_levels(f.m, f.L, 0, f.params, trunc, options)) {
        out.push_back(level.value);
    }
    for (double& v : out) v = fold(v, params.omega_ex);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> reference_levels(const SystemParams& params, int k_max) {
    std::vector<double> out;
    for (Spin s : {Spin::up, Spin::down}) {
        for (int K = 0; K <= k_max; ++K) out.push_back(fold(delta0_quasienergy(s, 0, K, params), params.omega_ex));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> numeric_levels(const SystemParams& params, const Truncation& trunc, double boundary_threshold,
                                   int count) {
    SpectrumOptions opts;
    opts.boundary_threshold = boundary_threshold;
    std::vector<NumericLevel> levels = quasienergy_spectrum(params, trunc, opts);
    std::stable_sort(levels.begin(), levels.end(),
                     [](const NumericLevel& a, const NumericLevel& b) { return a.mean_K < b.mean_K; });
    std::vector<double> out;
    for (int i = 0; i < count && i < static_cast<int>(levels.size()); ++i) out.push_back(levels[i].value);
    std::sort(out.begin(), out.end());
    out.resize(static_cast<std::size_t>(count), kNaN);
    return out;
}

std::vector<double> laguerre_roots(int K, int L, double alpha_max) {
    std::vector<double> roots;
    if (K <= 0 || !(alpha_max > 0.0)) return roots;
    // All roots lie below 4K + 2L + 2; the scan step resolves their spacing.
    const double hi = std::min(alpha_max, 4.0 * K + 2.0 * L + 2.0);
    const int n = 2000 * (K + 1);
    auto f = [&](double x) { return special::laguerre(K, L, x); };
    double x0 = 0.0;
    double f0 = f(x0);
    for (int i = 1; i <= n; ++i) {
        const double x1 = hi * i / n;
        const double f1 = f(x1);
        if (f1 == 0.0) {
            roots.push_back(x1);
        } else if (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
            double a = x0;
            double b = x1;
            double fa = f0;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

void add_metadata(CsvTable& table, const ScenarioConfig& config, const RunOptions& run) {
    table.meta("command", run.command);
    table.meta("build", run.build_id);
    table.meta("units", units_description(config));
    for (const auto& [key, value] : config.values) table.meta("config", key + " = " + value);
    table.meta("params", params_line(config.params));
    table.meta("truncation", truncation_line(config.trunc));
    for (const std::string& w : config_warnings(config)) table.meta("warning", w);
}

CsvTable spectrum_eps_table(const ScenarioConfig& config, const RunOptions& run) {
    const SystemParams& p0 = config.params;
    const Sweep sweep = resolve_sweep(config, "eps", 0.0, 2.0 * p0.omega_ex, 201);
    CsvTable table(spectrum_columns(config, {"eps"}));
    add_metadata(table, config, run);
    table.meta("sweep", fmt("eps from %.17g to %.17g, %d steps", sweep.start, sweep.stop, sweep.steps));
    table.meta("levels", "quasienergies folded into [-omega_ex/2, omega_ex/2), ascending per source");

    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(sweep.steps));
    parallel_for(sweep.steps, run.jobs, [&](int i) {
        SystemParams p = p0;
        p.epsilon = sweep.at(i);
        std::vector<std::string> cells{format_double(p.epsilon)};
        for (auto& c : spectrum_cells(config, p)) cells.push_back(std::move(c));
        rows[static_cast<std::size_t>(i)] = std::move(cells);
    });
    for (const auto& r : rows) table.row(r);
    return table;
}

CsvTable spectrum_g_table(const ScenarioConfig& config, const RunOptions& run) {
    const SystemParams& p0 = config.params;
    const Sweep sweep = resolve_sweep(config, "g", 0.0, 1.5 * p0.Omega, 121);
    const std::vector<double> amplitudes = config.A_values.empty() ? std::vector<double>{p0.A} : config.A_values;
    CsvTable table(spectrum_columns(config, {"A", "g"}));
    add_metadata(table, config, run);
    table.meta("sweep", fmt("g from %.17g to %.17g, %d steps, for each A", sweep.start, sweep.stop, sweep.steps));
    table.meta("levels", "quasienergies folded into [-omega_ex/2, omega_ex/2), ascending per source");

    const int n = sweep.steps * static_cast<int>(amplitudes.size());
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(n));
    parallel_for(n, run.jobs, [&](int i) {
        SystemParams p = p0;
        p.A = amplitudes[static_cast<std::size_t>(i / sweep.steps)];
        p.g = sweep.at(i % sweep.steps);
        std::vector<std::string> cells{format_double(p.A), format_double(p.g)};
        for (auto& c : spectrum_cells(config, p)) cells.push_back(std::move(c));
        rows[static_cast<std::size_t>(i)] = std::move(cells);
    });
    for (const auto& r : rows) table.row(r);
    return table;
}

CsvTable gaps_table(const ScenarioConfig& config, const RunOptions& run) {
    const SystemParams& p0 = config.params;
    const Sweep sweep = resolve_sweep(config, "g", 0.0, 1.5 * p0.Omega, 301);
    const Normalized f0 = normalized_family(p0, config.manifold.m, config.manifold.L);

    std::vector<std::string> cols{"g", "g_over_Omega", "alpha", "Delta_m"};
    for (int K = 0; K <= config.K_plot; ++K) cols.push_back("Omega_" + std::to_string(K));
    cols.push_back("zeros");
    CsvTable table(cols);
    add_metadata(table, config, run);
    table.meta("sweep", fmt("g from %.17g to %.17g, %d steps", sweep.start, sweep.stop, sweep.steps));
    table.meta("gaps", fmt("dressed gaps of the (m=%d, L=%d) family at n=0, %s order", config.manifold.m,
                           config.manifold.L, config.vanvleck.second_order ? "second" : "first"));

    // Zeros of L_K^{(L)}(alpha) inside the sweep, alpha = (2 g / Omega)^2.
    const double step = (sweep.stop - sweep.start) / (sweep.steps - 1);
    const double alpha_max = std::pow(2.0 * sweep.stop / p0.Omega, 2);
    std::vector<std::vector<double>> zero_g(static_cast<std::size_t>(config.K_plot + 1));
    for (int K = 0; K <= config.K_plot; ++K) {
        for (double a : laguerre_roots(K, f0.L, alpha_max)) {
            const double g = 0.5 * p0.Omega * std::sqrt(a);
            if (g < sweep.start || g > sweep.stop) continue;
            zero_g[static_cast<std::size_t>(K)].push_back(g);
            table.meta("laguerre_zero", fmt("K=%d alpha=%.17g g=%.17g", K, a, g));
        }
    }

    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(sweep.steps));
    parallel_for(sweep.steps, run.jobs, [&](int i) {
        SystemParams p = f0.params;
        p.g = sweep.at(i);
        std::vector<std::string> cells{format_double(p.g), format_double(p.g / p.Omega), format_double(p.alpha()),
                                       format_double(special::dressed_delta(-f0.m, p.delta, p.A, p.omega_ex))};
        std::string zeros;
        for (int K = 0; K <= config.K_plot; ++K) {
            cells.push_back(format_double(dressed_gap({f0.m, f0.L, 0, K}, p, config.trunc, config.vanvleck)));
            for (double gz : zero_g[static_cast<std::size_t>(K)]) {
                if (std::abs(p.g - gz) <= 0.5 * step) zeros += (zeros.empty() ? "" : ";") + std::to_string(K);
            }
        }
        cells.push_back(zeros);
        rows[static_cast<std::size_t>(i)] = std::move(cells);
    });
    for (const auto& r : rows) table.row(r);
    return table;
}

DynamicsTables dynamics_tables(const ScenarioConfig& config, const RunOptions& run) {
    const SystemParams& p = config.params;
    PeakOptions peak_opts;
    peak_opts.weight_threshold = config.peak_weight_threshold;
    peak_opts.vanvleck = config.vanvleck;

    std::vector<double> grid;
    if (config.t_end) {
        grid.resize(static_cast<std::size_t>(config.samples));
        for (int i = 0; i < config.samples; ++i) grid[static_cast<std::size_t>(i)] = *config.t_end * i / (config.samples - 1);
    } else {
        grid = default_dynamics_grid(p, config.trunc, config.theta, config.manifold, config.samples, peak_opts);
    }

    DynamicsOptions dyn_opts;
    dyn_opts.vanvleck = config.vanvleck;
    dyn_opts.max_leakage = config.max_leakage;
    const TimeSeries analytic = survival_analytic(p, config.theta, grid, config.trunc, config.manifold, dyn_opts);
    TimeSeries numeric;
    if (config.numeric) {
        PropagatorOptions prop;
        prop.substeps_per_period = config.substeps;
        numeric = survival_numeric(p, config.theta, grid, config.trunc, prop);
    }

    const Spectrum fa = fourier_spectrum(analytic, config.window);
    Spectrum fn;
    if (config.numeric) fn = fourier_spectrum(numeric, config.window);
    const auto predicted = predict_peaks(p, config.trunc, config.theta, config.trunc.k_max, config.manifold, peak_opts);

    std::vector<std::string> series_cols{"t", "P_analytic"};
    std::vector<std::string> spectrum_cols{"nu", "F_analytic"};
    if (config.numeric) {
        series_cols.push_back("P_numeric");
        spectrum_cols.push_back("F_numeric");
    }
    DynamicsTables out{CsvTable(series_cols), CsvTable(spectrum_cols)};
    for (CsvTable* t : {&out.series, &out.spectrum}) {
        add_metadata(*t, config, run);
        t->meta("grid", fmt("samples=%zu t_end=%.17g dt=%.17g", grid.size(), grid.back(), grid[1] - grid[0]));
        t->meta("spectrum", fmt("window=%s resolution=%.17g", to_string(config.window), fa.resolution));
        for (const PredictedPeak& pk : predicted) {
            t->meta("predicted_peak", fmt("freq=%.17g weight=%.17g label=", pk.freq, pk.weight) + pk.label);
        }
        for (const Peak& pk : find_peaks(fa, config.peak_rel_threshold)) {
            t->meta("peak_analytic", fmt("freq=%.17g amp=%.17g bin=%zu", pk.freq, pk.amp, pk.bin));
        }
        if (config.numeric) {
            for (const Peak& pk : find_peaks(fn, config.peak_rel_threshold)) {
                t->meta("peak_numeric", fmt("freq=%.17g amp=%.17g bin=%zu", pk.freq, pk.amp, pk.bin));
            }
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> r{grid[i], analytic.values[i]};
        if (config.numeric) r.push_back(numeric.values[i]);
        out.series.row(r);
    }
    for (std::size_t k = 0; k < fa.freqs.size(); ++k) {
        std::vector<double> r{fa.freqs[k], fa.amps[k]};
        if (config.numeric) r.push_back(fn.amps[k]);
        out.spectrum.row(r);
    }
    return out;
}

std::string validate_report(const ScenarioConfig& config) {
    const SystemParams& p = config.params;
    const Truncation& t = config.trunc;
    std::ostringstream out;
    out << "qosc validate\n";
    out << "units: " << units_description(config) << '\n';
    out << "params: " << params_line(p) << '\n';
    out << "truncation: " << truncation_line(t) << '\n';
    out << fmt("derived: alpha=%.6g A/omega_ex=%.6g Delta_0=%.6g theta=%.6g\n", p.alpha(), p.drive_ratio(),
               special::dressed_delta(0, p.delta, p.A, p.omega_ex), config.theta);

    const auto c = commensurability_check(p.Omega, p.omega_ex, config.commensurability_denominator);
    if (c) {
        out << fmt("commensurability: Omega/omega_ex = %d/%d, affected order >= %d\n", c->first, c->second,
                   std::min(c->first, c->second));
    } else {
        out << fmt("commensurability: none with denominator <= %d\n", config.commensurability_denominator);
    }

    const ResonanceIndex idx = nearest_doublet(p, config.m_span, config.L_max);
    out << fmt("nearest doublet: m=%d L=%d detuning=%.6g\n", idx.m, idx.L, resonance_detuning(p, idx.m, idx.L));

    out << "convergence under cutoff doubling:\n";
    const int k_cap = std::min(config.K_plot, t.k_max);
    Truncation sub = t;
    sub.k_max = std::max(k_cap, std::abs(idx.L));
    try {
        Truncation wide = sub;
        wide.p_max *= 2;
        wide.P_max *= 2;
        const auto base = analytic_levels(p, sub, idx.m, idx.L, config.vanvleck);
        const auto doubled = analytic_levels(p, wide, idx.m, idx.L, config.vanvleck);
        out << fmt("  analytic levels (K <= %d), p_max and P_max doubled: max delta %.3e\n", sub.k_max,
                   max_level_delta(base, doubled, p.omega_ex));
    } catch (const SmallDenominatorError& e) {
        out << "  analytic levels, p_max and P_max doubled: " << e.what() << '\n';
    }

    if (config.numeric) {
        const int count = 2 * (k_cap + 1);
        const Truncation base = numeric_truncation(config);
        Truncation wide_l = base;
        wide_l.l_max *= 2;
        Truncation wide_k = base;
        wide_k.k_max *= 2;
        const auto ref = numeric_levels(p, base, config.boundary_threshold, count);
        for (const auto& [label, trunc] : {std::pair{"l_max", wide_l}, std::pair{"k_max", wide_k}}) {
            const Eigen::Index dim = SambeBasis{trunc.k_max, trunc.l_max}.dim();
            if (dim > 6000) {
                out << fmt("  numeric levels, %s doubled: skipped (Sambe dimension %ld)\n", label, static_cast<long>(dim));
                continue;
            }
            const auto other = numeric_levels(p, trunc, config.boundary_threshold, count);
            out << fmt("  numeric levels (%d lowest), %s doubled: max delta %.3e\n", count, label,
                       max_level_delta(ref, other, p.omega_ex));
        }
    }
    const double kept = dressed_populations(p, config.theta, t.k_max).sum();
    out << fmt("  dressed initial-state weight beyond k_max: %.3e\n", std::max(0.0, 1.0 - kept));

    const auto warnings = config_warnings(config);
    for (const std::string& w : warnings) out << "warning: " << w << '\n';
    out << "status: " << (warnings.empty() ? "ok" : "ok with warnings") << '\n';
    return out.str();
}

std::string spectrum_path(const std::string& out) {
    const std::string ext = ".csv";
    if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
        return out.substr(0, out.size() - ext.size()) + "_spectrum.csv";
    }
    return out + "_spectrum.csv";
}

void run_command(const ScenarioConfig& config, const RunOptions& run) {
    if (run.command == "spectrum-eps") {
        write_table(spectrum_eps_table(config, run), run.out);
    } else if (run.command == "spectrum-g") {
        write_table(spectrum_g_table(config, run), run.out);
    } else if (run.command == "gaps") {
        write_table(gaps_table(config, run), run.out);
    } else if (run.command == "dynamics") {
        if (run.out == "-") throw ConfigError("dynamics writes two files; --out must be a path");
        const DynamicsTables tables = dynamics_tables(config, run);
        write_table(tables.series, run.out);
        write_table(tables.spectrum, spectrum_path(run.out));
    } else {
        throw ConfigError("unknown command '" + run.command + "'");
    }
}

} // namespace qosc::cli
