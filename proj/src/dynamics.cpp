// dynamics.cpp — analytic survival probability, spectra and peak prediction

#include "qosc/dynamics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "qosc/errors.hpp"
#include "qosc/specialfns.hpp"

namespace qosc {

const char* to_string(Window w) noexcept {
    switch (w) {
        case Window::rectangular: return "rectangular";
        case Window::hann: return "hann";
        case Window::blackman: return "blackman";
    }
    return "?";
}

Window window_from_string(const std::string& name) {
    if (name == "rectangular" || name == "rect") return Window::rectangular;
    if (name == "hann") return Window::hann;
    if (name == "blackman") return Window::blackman;
    throw ConfigError("unknown window '" + name + "' (rectangular, hann, blackman)");
}

Eigen::VectorXd thermal_weights(double theta, int k_max) {
    if (!(theta > 0.0)) {
        throw DomainError("thermal_weights: theta must be > 0");
    }
    if (k_max < 0) {
        throw DomainError("thermal_weights: k_max must be >= 0");
    }
    Eigen::VectorXd p(k_max + 1);
    p(0) = 1.0;
    for (int K = 1; K <= k_max; ++K) {
        p(K) = std::exp(-K * theta);
    }
    return p / p.sum();
}

Eigen::VectorXd thermal_weights_cut(double theta, int k_max, double tail) {
    const Eigen::VectorXd p = thermal_weights(theta, k_max);
    double cumulative = 0.0;
    Eigen::Index count = 0;
    while (count < p.size()) {
        cumulative += p(count);
        ++count;
        if (cumulative >= 1.0 - tail) break;
    }
    Eigen::VectorXd head = p.head(count);
    return head / head.sum();
}

namespace {

struct NormalizedManifold {
    Manifold manifold;
    SystemParams params;
    Spin initial_spin;
};

NormalizedManifold normalize_manifold(const SystemParams& params, Manifold manifold) {
    if (manifold.L >= 0) {
        return {manifold, params, Spin::down};
    }
    return {Manifold{-manifold.m, -manifold.L}, flip_spin(params), Spin::up};
}

double displacement_for(Spin spin, const SystemParams& params) {
    return (spin == Spin::up ? -1.0 : 1.0) * params.g / params.Omega;
}

} // namespace

Eigen::VectorXd dressed_populations(const SystemParams& params, double theta, int k_max) {
    params.validate();
    const Eigen::VectorXd weights = thermal_weights_cut(theta, k_max);
    const double lambda = params.g / params.Omega;
    Eigen::VectorXd pop = Eigen::VectorXd::Zero(k_max + 1);
    for (Eigen::Index K0 = 0; K0 < weights.size(); ++K0) {
        for (int Kd = 0; Kd <= k_max; ++Kd) {
            const double a = special::displacement_overlap(static_cast<int>(K0), Kd, lambda);
            pop(Kd) += weights(K0) * a * a;
        }
    }
    return pop;
}

TimeSeries survival_analytic(const SystemParams& params, double theta, const std::vector<double>& t_grid,
                             const Truncation& trunc, Manifold manifold, const DynamicsOptions& options) {
    params.validate();
    trunc.validate();
    const auto [mf, p, initial_spin] = normalize_manifold(params, manifold);
    const double detuning = resonance_detuning(p, mf.m, mf.L);
    const double tolerance = 0.25 * std::min(p.omega_ex, p.Omega);
    if (std::abs(detuning) > tolerance) {
        std::ostringstream msg;
        msg << "survival_analytic: bias is " << detuning << " away from the (m=" << manifold.m
            << ", L=" << manifold.L << ") resonance (limit " << tolerance << ")";
        throw ConfigError(msg.str());
    }

    // Dressed levels Kd of the initial spin. For spin down, Kd < L are the
    // uncoupled levels and Kd >= L pairs with block K = Kd - L; for spin up
    // (exchanged problem) every Kd = K pairs with block K.
    const int n_dressed = trunc.k_max + 1 + (initial_spin == Spin::down ? mf.L : 0);
    struct Level {
        double constant{1.0};
        double oscillating{0.0};
        double gap{0.0};
    };
    std::vector<Level> levels(static_cast<std::size_t>(n_dressed));
    for (int Kd = 0; Kd < n_dressed; ++Kd) {
        const int K = initial_spin == Spin::down ? Kd - mf.L : Kd;
        if (K < 0) continue;
        const EffectiveBlock block = effective_block(ResonanceIndex{mf.m, mf.L, 0, K}, p, trunc, options.vanvleck);
        const auto [minus, plus] = block_eigenvectors(block);
        const double bm = initial_spin == Spin::down ? minus.down : minus.up;
        const double bp = initial_spin == Spin::down ? plus.down : plus.up;
        const double bm2 = bm * bm;
        const double bp2 = bp * bp;
        Level& level = levels[static_cast<std::size_t>(Kd)];
        level.constant = bm2 * bm2 + bp2 * bp2;
        level.oscillating = 2.0 * bm2 * bp2;
        level.gap = std::hypot(block.e_down - block.e_up, 2.0 * block.coupling);
    }

    const Eigen::VectorXd thermal = thermal_weights_cut(theta, trunc.k_max);
    const double lambda = displacement_for(initial_spin, p);
    Eigen::VectorXd pop = Eigen::VectorXd::Zero(n_dressed);
    double leaked = 0.0;
    for (Eigen::Index K0 = 0; K0 < thermal.size(); ++K0) {
        Eigen::VectorXd a2(n_dressed);
        for (int Kd = 0; Kd < n_dressed; ++Kd) {
            const double a = special::displacement_overlap(static_cast<int>(K0), Kd, lambda);
            a2(Kd) = a * a;
        }
        const double captured = a2.sum();
        leaked += thermal(K0) * (1.0 - captured);
        pop += thermal(K0) * a2 / captured;
    }
    if (leaked > options.max_leakage) {
        throw TruncationError("k_max", leaked);
    }

    TimeSeries out;
    out.times = t_grid;
    out.values.resize(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double value = 0.0;
        for (int Kd = 0; Kd < n_dressed; ++Kd) {
            const Level& level = levels[static_cast<std::size_t>(Kd)];
            value += pop(Kd) * (level.constant + level.oscillating * std::cos(level.gap * t_grid[i]));
        }
        if (value < -1e-6 || value > 1.0 + 1e-6) {
            throw NumericError("survival_analytic: probability " + std::to_string(value) + " outside [0, 1]");
        }
        out.values[i] = value;
    }
    return out;
}

Spectrum fourier_spectrum(const TimeSeries& series, Window window) {
    const std::size_t n = series.values.size();
    if (n < 2 || series.times.size() != n) {
        throw DomainError("fourier_spectrum: need at least two samples with matching times");
    }
    const double dt = series.times[1] - series.times[0];
    if (!(dt > 0.0)) {
        throw DomainError("fourier_spectrum: times must increase");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(series.times[i] - series.times[0] - double(i) * dt) > 1e-6 * dt) {
            throw DomainError("fourier_spectrum: time grid is not uniform");
        }
    }

    double mean = 0.0;
    for (double v : series.values) mean += v;
    mean /= double(n);

    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> input(n);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = two_pi * double(i) / double(n);
        double w = 1.0;
        switch (window) {
            case Window::rectangular: w = 1.0; break;
            case Window::hann: w = 0.5 - 0.5 * std::cos(phase); break;
            case Window::blackman: w = 0.42 - 0.5 * std::cos(phase) + 0.08 * std::cos(2.0 * phase); break;
        }
        input[i] = w * (series.values[i] - mean);
        weight_sum += w;
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> output;
    fft.fwd(output, input);

    Spectrum spec;
    spec.window = window;
    spec.resolution = two_pi / (double(n) * dt);
    const std::size_t n_bins = n / 2 + 1;
    spec.freqs.resize(n_bins);
    spec.amps.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        const bool single = (k == 0) || (n % 2 == 0 && k == n / 2);
        spec.freqs[k] = double(k) * spec.resolution;
        spec.amps[k] = (single ? 1.0 : 2.0) * std::abs(output[k]) / weight_sum;
    }
    return spec;
}

std::vector<Peak> find_peaks(const Spectrum& spectrum, double rel_threshold) {
    const std::size_t n = spectrum.amps.size();
    std::vector<Peak> out;
    if (n < 2) return out;
    double max_amp = 0.0;
    for (std::size_t k = 1; k < n; ++k) max_amp = std::max(max_amp, spectrum.amps[k]);
    if (max_amp <= 0.0) return out;
    for (std::size_t k = 1; k < n; ++k) {
        const double a = spectrum.amps[k];
        const bool left = a > spectrum.amps[k - 1];
        const bool right = (k + 1 == n) || a >= spectrum.amps[k + 1];
        if (left && right && a >= rel_threshold * max_amp) {
            out.push_back({spectrum.freqs[k], a, k});
        }
    }
    return out;
}

std::vector<PredictedPeak> predict_peaks(const SystemParams& params, const Truncation& trunc, double theta, int k_max,
                                         Manifold manifold, const PeakOptions& options) {
    params.validate();
    const auto [mf, p, initial_spin] = normalize_manifold(params, manifold);
    const Eigen::VectorXd pop = dressed_populations(p, theta, k_max);
    const double max_pop = pop.maxCoeff();
    const double scale = std::max(p.Omega, p.omega_ex);

    std::vector<int> populated;
    for (int Kd = 0; Kd <= k_max; ++Kd) {
        if (pop(Kd) >= options.weight_threshold * max_pop) populated.push_back(Kd);
    }

    struct Gap {
        double freq;
        int K;
        double weight;
    };
    std::vector<Gap> gaps;
    for (int Kd : populated) {
        const int K = initial_spin == Spin::down ? Kd - mf.L : Kd;
        if (K < 0) continue;
        const double gap = dressed_gap(ResonanceIndex{mf.m, mf.L, 0, K}, p, trunc, options.vanvleck);
        if (gap > 1e-12 * scale) gaps.push_back({gap, Kd, pop(Kd)});
    }
    std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
        return a.freq != b.freq ? a.freq < b.freq : a.K < b.K;
    });

    std::vector<PredictedPeak> merged;
    for (std::size_t i = 0; i < gaps.size();) {
        std::size_t j = i;
        std::vector<int> ks;
        double weight = 0.0;
        while (j < gaps.size() && std::abs(gaps[j].freq - gaps[i].freq) <= 1e-9 * gaps[i].freq) {
            ks.push_back(gaps[j].K);
            weight += gaps[j].weight;
            ++j;
        }
        std::sort(ks.begin(), ks.end());
        std::string label;
        for (std::size_t q = 0; q < ks.size(); ++q) {
            label += (q ? "=" : "") + std::string("Omega^") + std::to_string(ks[q]);
        }
        merged.push_back({gaps[i].freq, label, weight});
        i = j;
    }

    std::vector<PredictedPeak> out = merged;
    int max_diff = 0;
    if (!populated.empty()) max_diff = populated.back() - populated.front();
    for (int d = 1; d <= max_diff; ++d) {
        out.push_back({d * p.Omega, std::to_string(d) + "*Omega", 0.0});
        for (const PredictedPeak& g : merged) {
            out.push_back({g.freq + d * p.Omega, g.label + "+" + std::to_string(d) + "*Omega", 0.0});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const PredictedPeak& a, const PredictedPeak& b) { return a.freq < b.freq; });
    return out;
}

std::vector<double> default_dynamics_grid(const SystemParams& params, const Truncation& trunc, double theta,
                                          Manifold manifold, int samples, const PeakOptions& options) {
    if (samples < 2) {
        throw DomainError("default_dynamics_grid: need at least two samples");
    }
    const std::vector<PredictedPeak> peaks = predict_peaks(params, trunc, theta, trunc.k_max, manifold, options);
    double slowest = std::numeric_limits<double>::infinity();
    for (const PredictedPeak& pk : peaks) {
        if (pk.label.rfind("Omega^", 0) == 0 && pk.label.find('+') == std::string::npos) {
            slowest = std::min(slowest, pk.freq);
        }
    }
    const double span = std::isfinite(slowest) ? 50.0 * 2.0 * std::numbers::pi / slowest : 500.0 / params.Omega;
    const double period = params.drive_period();
    const double dt = std::max(1.0, std::ceil(span / double(samples - 1) / period)) * period;
    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) grid[static_cast<std::size_t>(i)] = i * dt;
    return grid;
}

std::vector<double> moving_average(const std::vector<double>& values, int width) {
    if (width < 1) {
        throw DomainError("moving_average: width must be >= 1");
    }
    const long n = static_cast<long>(values.size());
    std::vector<double> out(values.size());
    std::vector<double> prefix(values.size() + 1, 0.0);
    for (long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];
    for (long i = 0; i < n; ++i) {
        const long start = i - width / 2;
        const long lo = std::max(0L, start);
        const long hi = std::min(n, start + width);
        out[i] = (prefix[hi] - prefix[lo]) / double(hi - lo);
    }
    return out;
}

} // namespace qosc
