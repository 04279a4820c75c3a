// floquet_numeric.cpp — Sambe-space diagonalization and direct propagation

#include "qosc/floquet_numeric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "qosc/dynamics.hpp"

namespace qosc {

namespace {

using cd = std::complex<double>;

double fold(double value, double center, double period) {
    const double lo = center - 0.5 * period;
    return value - period * std::floor((value - lo) / period);
}

// Step propagators of one drive period, stored cumulatively:
// cumulative_[j] = U(j h <- 0), j = 0..N.
class PeriodicPropagator {
public:
    PeriodicPropagator(const SystemParams& params, int k_max, int substeps)
        : params_(params), k_max_(k_max), substeps_(substeps) {
        if (substeps < 1) {
            throw DomainError("evolve: substeps_per_period must be >= 1");
        }
        const Eigen::Index dim = 2 * (k_max + 1);
        const double bytes = double(substeps + 1) * double(dim) * double(dim) * sizeof(cd);
        if (bytes > 1.0e9) {
            throw NumericError("evolve: one-period propagator cache would need more than 1 GB");
        }
        h0_ = bare_hamiltonian(params, k_max, 0.0);
        drive_op_ = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            drive_op_(i, i) = (i <= k_max ? -0.5 : 0.5);
        }
        // h0_ includes the drive at t = 0; remove it.
        h0_ -= params.A * drive_op_;

        period_ = params.drive_period();
        step_ = period_ / substeps;
        cumulative_.reserve(static_cast<std::size_t>(substeps + 1));
        cumulative_.push_back(Eigen::MatrixXcd::Identity(dim, dim));
        for (int j = 0; j < substeps; ++j) {
            cumulative_.push_back(magnus_step(j * step_, step_) * cumulative_.back());
        }
    }

    double period() const noexcept { return period_; }
    double step() const noexcept { return step_; }
    int substeps() const noexcept { return substeps_; }
    const Eigen::MatrixXcd& cumulative(int j) const { return cumulative_[static_cast<std::size_t>(j)]; }
    const Eigen::MatrixXcd& one_period() const { return cumulative_.back(); }

    Eigen::MatrixXd hamiltonian(double t) const {
        return h0_ + params_.A * std::cos(params_.omega_ex * t) * drive_op_;
    }

    // Fourth-order Magnus step U(t0 + dt <- t0) with two Gauss points.
    Eigen::MatrixXcd magnus_step(double t0, double dt) const {
        const double c = std::sqrt(3.0) / 6.0;
        const Eigen::MatrixXd h1 = hamiltonian(t0 + (0.5 - c) * dt);
        const Eigen::MatrixXd h2 = hamiltonian(t0 + (0.5 + c) * dt);
        const Eigen::MatrixXd comm = h2 * h1 - h1 * h2;
        Eigen::MatrixXcd gen = (0.5 * dt * (h1 + h2)).cast<cd>();
        gen += cd(0.0, -std::sqrt(3.0) / 12.0 * dt * dt) * comm.cast<cd>();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gen);
        if (es.info() != Eigen::Success) {
            throw NumericError("evolve: eigensolver failed in propagator step");
        }
        Eigen::VectorXcd phases(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < phases.size(); ++i) {
            phases(i) = std::polar(1.0, -es.eigenvalues()(i));
        }
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }

private:
    SystemParams params_;
    int k_max_;
    int substeps_;
    double period_{0.0};
    double step_{0.0};
    Eigen::MatrixXd h0_;
    Eigen::MatrixXd drive_op_;
    std::vector<Eigen::MatrixXcd> cumulative_;
};

void check_grid(const std::vector<double>& t_grid) {
    if (t_grid.empty()) {
        throw DomainError("time grid is empty");
    }
    if (!(t_grid.front() >= 0.0)) {
        throw DomainError("time grid must start at t >= 0");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) {
            throw DomainError("time grid must be strictly increasing");
        }
    }
}

// Propagates every column of `states` (bare basis at t = 0) to each grid time
// and calls visit(sample_index, states_at_t).
template <typename Visit>
void propagate(const PeriodicPropagator& prop, Eigen::MatrixXcd states, const std::vector<double>& t_grid,
               Visit&& visit) {
    const double period = prop.period();
    const double step = prop.step();
    long current_period = 0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        long k = static_cast<long>(std::floor(t / period));
        double tau = t - k * period;
        if (tau < 0.0) {
            tau = 0.0;
        }
        double jf = std::floor(tau / step);
        double rem = tau - jf * step;
        if (step - rem < 1e-9 * step) {
            jf += 1.0;
            rem = 0.0;
        } else if (rem < 1e-9 * step) {
            rem = 0.0;
        }
        int j = static_cast<int>(jf);
        if (j > prop.substeps()) {
            j = prop.substeps();
        }
        while (current_period < k) {
            states = prop.one_period() * states;
            ++current_period;
        }
        Eigen::MatrixXcd at_t = prop.cumulative(j) * states;
        if (rem > 0.0) {
            at_t = prop.magnus_step(j * step, rem) * at_t;
        }
        visit(i, at_t);
    }
}

} // namespace

Eigen::VectorXd sambe_eigenvalues(const SystemParams& params, const Truncation& trunc) {
    const Eigen::MatrixXd h = build_sambe_matrix<double>(params, trunc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("sambe_eigenvalues: eigensolver failed");
    }
    return es.eigenvalues();
}

std::vector<NumericLevel> quasienergy_spectrum(const SystemParams& params, const Truncation& trunc,
                                               const SpectrumOptions& options) {
    const Eigen::MatrixXd h = build_sambe_matrix<double>(params, trunc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericError("quasienergy_spectrum: eigensolver failed");
    }
    const SambeBasis basis{trunc.k_max, trunc.l_max};
    std::vector<NumericLevel> out;
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
        const auto v = es.eigenvectors().col(c);
        NumericLevel level;
        level.unfolded = es.eigenvalues()(c);
        for (Spin spin : {Spin::up, Spin::down}) {
            for (int K = 0; K <= trunc.k_max; ++K) {
                for (int l = -trunc.l_max; l <= trunc.l_max; ++l) {
                    const double w = v(basis.index(spin, K, l)) * v(basis.index(spin, K, l));
                    if (K == trunc.k_max || l == -trunc.l_max || l == trunc.l_max) level.boundary_weight += w;
                    if (spin == Spin::up) level.up_weight += w;
                    level.mean_K += w * K;
                    level.mean_l += w * l;
                }
            }
        }
        if (level.boundary_weight > options.boundary_threshold) continue;
        if (options.one_replica && !(level.mean_l >= -0.5 && level.mean_l < 0.5)) continue;
        level.value = fold(level.unfolded, options.zone_center, params.omega_ex);
        out.push_back(level);
    }
    std::sort(out.begin(), out.end(), [](const NumericLevel& a, const NumericLevel& b) { return a.value < b.value; });
    return out;
}

Eigen::MatrixXd bare_hamiltonian(const SystemParams& params, int k_max, double t) {
    const Eigen::Index nk = k_max + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
    const double bias = params.epsilon + params.A * std::cos(params.omega_ex * t);
    for (int s = 0; s < 2; ++s) {
        const double sz = s == 0 ? 1.0 : -1.0;
        for (int K = 0; K <= k_max; ++K) {
            const Eigen::Index i = s * nk + K;
            h(i, i) = -0.5 * sz * bias + K * params.Omega;
            if (K < k_max) {
                h(i, i + 1) = h(i + 1, i) = sz * params.g * std::sqrt(K + 1.0);
            }
        }
    }
    for (int K = 0; K <= k_max; ++K) {
        h(K, nk + K) = h(nk + K, K) = -0.5 * params.delta;
    }
    return h;
}

EvolutionResult evolve(const SystemParams& params, const Eigen::VectorXcd& initial, const std::vector<double>& t_grid,
                       const Truncation& trunc, const PropagatorOptions& options) {
    params.validate();
    trunc.validate();
    check_grid(t_grid);
    const Eigen::Index dim = 2 * (trunc.k_max + 1);
    if (initial.size() != dim) {
        throw DomainError("evolve: initial state has wrong dimension");
    }
    if (std::abs(initial.norm() - 1.0) > 1e-10) {
        throw DomainError("evolve: initial state must be normalized");
    }
    const PeriodicPropagator prop(params, trunc.k_max, options.substeps_per_period);

    EvolutionResult result;
    result.times = t_grid;
    result.state_norms.resize(t_grid.size());
    result.survival.resize(t_grid.size());
    const Eigen::Index nk = trunc.k_max + 1;
    propagate(prop, initial, t_grid, [&](std::size_t i, const Eigen::MatrixXcd& psi) {
        const double norm = psi.col(0).norm();
        if (std::abs(norm - 1.0) > options.norm_tol) {
            throw NumericError("evolve: norm drift " + std::to_string(norm - 1.0) + " exceeds tolerance");
        }
        result.state_norms[i] = norm;
        result.survival[i] = psi.col(0).tail(nk).squaredNorm();
    });
    return result;
}

TimeSeries survival_numeric(const SystemParams& params, double theta, const std::vector<double>& t_grid,
                            const Truncation& trunc, const PropagatorOptions& options) {
    params.validate();
    trunc.validate();
    check_grid(t_grid);
    const Eigen::VectorXd weights = thermal_weights_cut(theta, trunc.k_max);
    const Eigen::Index nk = trunc.k_max + 1;
    const Eigen::Index n_init = weights.size();

    Eigen::MatrixXcd initial = Eigen::MatrixXcd::Zero(2 * nk, n_init);
    for (Eigen::Index K = 0; K < n_init; ++K) {
        initial(nk + K, K) = 1.0;
    }
    const PeriodicPropagator prop(params, trunc.k_max, options.substeps_per_period);

    TimeSeries out;
    out.times = t_grid;
    out.values.resize(t_grid.size());
    propagate(prop, initial, t_grid, [&](std::size_t i, const Eigen::MatrixXcd& psi) {
        double p = 0.0;
        for (Eigen::Index K = 0; K < n_init; ++K) {
            const double norm = psi.col(K).norm();
            if (std::abs(norm - 1.0) > options.norm_tol) {
                throw NumericError("survival_numeric: norm drift " + std::to_string(norm - 1.0) +
                                   " exceeds tolerance");
            }
            p += weights(K) * psi.col(K).tail(nk).squaredNorm();
        }
        out.values[i] = p;
    });
    return out;
}

} // namespace qosc
