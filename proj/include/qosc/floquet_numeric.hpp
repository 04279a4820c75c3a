// floquet_numeric.hpp — brute-force reference solution
//
// Quasienergies from the truncated Floquet Hamiltonian H(t) - i d/dt in Sambe
// space (spin x Fock x Fourier), and survival probabilities from direct
// propagation of the time-dependent Schroedinger equation. Neither path uses
// the perturbative machinery in vanvleck.hpp.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "qosc/errors.hpp"
#include "qosc/model.hpp"
#include "qosc/series.hpp"

namespace qosc {

// Sambe basis index (spin, K, l), lexicographic: spin slowest, l fastest.
struct SambeBasis {
    int k_max{0};
    int l_max{0};

    Eigen::Index dim() const noexcept { return 2 * static_cast<Eigen::Index>(k_max + 1) * (2 * l_max + 1); }
    Eigen::Index index(Spin spin, int K, int l) const noexcept {
        const int s = spin == Spin::up ? 0 : 1;
        return (static_cast<Eigen::Index>(s) * (k_max + 1) + K) * (2 * l_max + 1) + (l + l_max);
    }
};

inline constexpr Eigen::Index kDefaultMaxSambeDim = 20000;

// Floquet Hamiltonian in Sambe space:
//   diagonal   -/+ eps/2 + K Omega - l omega_ex
//   drive      -/+ A/4 between l and l +/- 1
//   tunneling  -Delta/2 between up and down
//   coupling   +/- g sqrt(K+1) between K and K+1
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> build_sambe_matrix(const SystemParams& params,
                                                                         const Truncation& trunc,
                                                                         Eigen::Index max_dim = kDefaultMaxSambeDim) {
    params.validate();
    trunc.validate();
    const SambeBasis basis{trunc.k_max, trunc.l_max};
    if (basis.dim() > max_dim) {
        throw NumericError("build_sambe_matrix: dimension " + std::to_string(basis.dim()) + " exceeds limit " +
                           std::to_string(max_dim));
    }
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat h = Mat::Zero(basis.dim(), basis.dim());
    for (Spin spin : {Spin::up, Spin::down}) {
        const Scalar sz = Scalar(spin_sign(spin));
        for (int K = 0; K <= trunc.k_max; ++K) {
            for (int l = -trunc.l_max; l <= trunc.l_max; ++l) {
                const auto i = basis.index(spin, K, l);
                h(i, i) = -sz * Scalar(0.5 * params.epsilon) + Scalar(K * params.Omega) - Scalar(l * params.omega_ex);
                if (l < trunc.l_max) {
                    const auto j = basis.index(spin, K, l + 1);
                    h(i, j) = h(j, i) = -sz * Scalar(0.25 * params.A);
                }
                if (K < trunc.k_max) {
                    const auto j = basis.index(spin, K + 1, l);
                    h(i, j) = h(j, i) = sz * Scalar(params.g * std::sqrt(K + 1.0));
                }
                if (spin == Spin::up) {
                    const auto j = basis.index(Spin::down, K, l);
                    h(i, j) = h(j, i) = Scalar(-0.5 * params.delta);
                }
            }
        }
    }
    return h;
}

// Unfolded eigenvalues of the Sambe matrix, ascending.
Eigen::VectorXd sambe_eigenvalues(const SystemParams& params, const Truncation& trunc);

struct NumericLevel {
    double value{0.0};           // folded into [zone_center - w/2, zone_center + w/2)
    double unfolded{0.0};        // Sambe eigenvalue
    double boundary_weight{0.0}; // weight on K = k_max and l = +/- l_max slices
    double up_weight{0.0};
    double mean_K{0.0};
    double mean_l{0.0};
};

struct SpectrumOptions {
    double zone_center{0.0};
    double boundary_threshold{0.1};  // drop states above this boundary weight
    bool one_replica{true};          // keep the replica with mean_l in [-1/2, 1/2)
};

// Folded quasienergies of interior Sambe eigenstates, ascending by value.
std::vector<NumericLevel> quasienergy_spectrum(const SystemParams& params, const Truncation& trunc,
                                               const SpectrumOptions& options = {});

struct PropagatorOptions {
    int substeps_per_period{512};  // fourth-order Magnus steps per drive period
    double norm_tol{1e-8};
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<double> state_norms;
    std::vector<double> survival;  // spin-down population
};

// Bare (spin, Fock) Hamiltonian at time t, dimension 2 (k_max + 1), ordered
// spin-major like the Sambe basis.
Eigen::MatrixXd bare_hamiltonian(const SystemParams& params, int k_max, double t);

// Propagates `initial` (bare basis, normalized) over t_grid. Exploits the
// drive periodicity: step propagators inside one period are computed once and
// reused in later periods. Throws NumericError if the norm drifts beyond
// options.norm_tol.
EvolutionResult evolve(const SystemParams& params, const Eigen::VectorXcd& initial, const std::vector<double>& t_grid,
                       const Truncation& trunc, const PropagatorOptions& options = {});

// Thermal survival probability: sum_K p_K P(t | down x |K>), weights from
// thermal_weights(theta) cut where the cumulative weight reaches 1 - 1e-10
// and renormalized.
TimeSeries survival_numeric(const SystemParams& params, double theta, const std::vector<double>& t_grid,
                            const Truncation& trunc, const PropagatorOptions& options = {});

} // namespace qosc
