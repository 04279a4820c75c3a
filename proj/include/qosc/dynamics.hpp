// dynamics.hpp — analytic qubit dynamics from the effective-block Floquet
// modes, and spectral analysis of survival probabilities

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "qosc/model.hpp"
#include "qosc/series.hpp"
#include "qosc/vanvleck.hpp"

namespace qosc {

// Boltzmann weights p_K = e^{-K theta} / Z over K in [0, k_max];
// theta = hbar Omega / (k_B T), theta = +inf allowed.
Eigen::VectorXd thermal_weights(double theta, int k_max);

// Leading weights up to the first K where the cumulative weight reaches
// 1 - tail, renormalized to sum to one.
Eigen::VectorXd thermal_weights_cut(double theta, int k_max, double tail = 1e-10);

// Resonance family (m, L) whose blocks carry the dynamics.
struct Manifold {
    int m{0};
    int L{0};
};

struct DynamicsOptions {
    VanVleckOptions vanvleck{};
    double max_leakage{0.05};  // thermal initial-state weight allowed outside the kept modes
};

// Survival probability P_{down->down}(t) for the factorized initial state
// |down><down| x thermal(theta), evolved in the Floquet eigenbasis of the
// manifold's effective blocks (n dropped). Throws ConfigError when eps is
// far from the manifold's resonance, TruncationError on excessive leakage
// and NumericError if any value leaves [0, 1] by more than 1e-6.
TimeSeries survival_analytic(const SystemParams& params, double theta, const std::vector<double>& t_grid,
                             const Truncation& trunc, Manifold manifold, const DynamicsOptions& options = {});

// Weight of each dressed spin-down oscillator level Kd in the initial state,
// summed over the thermal ensemble.
Eigen::VectorXd dressed_populations(const SystemParams& params, double theta, int k_max);

// DFT amplitude spectrum of the mean-subtracted series. Throws DomainError on
// fewer than two samples or a non-uniform grid.
Spectrum fourier_spectrum(const TimeSeries& series, Window window = Window::rectangular);

struct Peak {
    double freq{0.0};
    double amp{0.0};
    std::size_t bin{0};
};

// Local maxima (DC excluded) with amplitude >= rel_threshold * max amplitude.
std::vector<Peak> find_peaks(const Spectrum& spectrum, double rel_threshold);

struct PredictedPeak {
    double freq{0.0};
    std::string label;
    double weight{0.0};
};

struct PeakOptions {
    double weight_threshold{0.02};  // relative to the most populated dressed level
    VanVleckOptions vanvleck{};
};

// Frequencies expected in P(t): dressed gaps Omega^K of populated levels
// (equal values merged into one label), oscillator differences (K - K') Omega
// and the sums of both.
std::vector<PredictedPeak> predict_peaks(const SystemParams& params, const Truncation& trunc, double theta, int k_max,
                                         Manifold manifold, const PeakOptions& options = {});

// Uniform grid of `samples` points starting at 0 whose spacing is a whole
// number of drive periods and whose span covers >= 50 periods of the slowest
// nonzero predicted gap (>= 500 / Omega when every gap vanishes).
std::vector<double> default_dynamics_grid(const SystemParams& params, const Truncation& trunc, double theta,
                                          Manifold manifold, int samples = 4096, const PeakOptions& options = {});

// Centered moving average over `width` samples; edges use the available
// samples only.
std::vector<double> moving_average(const std::vector<double>& values, int width);

} // namespace qosc
