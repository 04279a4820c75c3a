// vanvleck.cpp — dressed couplings, second-order shifts, effective blocks and
// Floquet modes of the perturbative solution

#include "qosc/vanvleck.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "qosc/errors.hpp"
#include "qosc/specialfns.hpp"

namespace qosc {

namespace {

void require_normalized(const ResonanceIndex& index) {
    if (index.L < 0) {
        throw DomainError("resonance index has L < 0; normalize() it first");
    }
    if (index.K < 0) {
        throw DomainError("resonance index has K < 0");
    }
}

double parity(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

} // namespace

const char* to_string(Branch b) noexcept {
    switch (b) {
        case Branch::minus: return "minus";
        case Branch::plus: return "plus";
        case Branch::uncoupled_down: return "uncoupled_down";
    }
    return "?";
}

double delta0_quasienergy(Spin spin, int n, int K, const SystemParams& params) {
    return -spin_sign(spin) * 0.5 * params.epsilon - n * params.omega_ex + K * params.Omega -
           params.g * params.g / params.Omega;
}

double dressed_coupling(int n, int K, int n_p, int K_p, const SystemParams& params) {
    if (K < 0 || K_p < 0) {
        throw DomainError("dressed_coupling: Fock indices must be non-negative");
    }
    const int dK = K_p - K;
    const int L = std::abs(dK);
    const double sign = (dK < 0) ? parity(L) : 1.0;
    return sign * special::dressed_delta(n_p - n, params.delta, params.A, params.omega_ex) *
           special::xi(std::min(K, K_p), L, params.alpha());
}

double second_order_shift(Spin spin, int /*n*/, int K, int m, int L, const SystemParams& params,
                          const Truncation& trunc, ShiftConvention convention) {
    params.validate();
    trunc.validate();
    if (K < 0 || L < 0) {
        throw DomainError("second_order_shift: K and L must be non-negative");
    }
    if (params.delta == 0.0) {
        return 0.0;
    }
    double osc_sign = spin_sign(spin);
    if (convention == ShiftConvention::spin_reversed) {
        osc_sign = -osc_sign;
    }
    const int excluded_p = -m;
    const int excluded_P = static_cast<int>(osc_sign) * L;

    const Eigen::VectorXd bessel = special::bessel_j_table(trunc.p_max, params.drive_ratio());
    const double alpha = params.alpha();

    double sum = 0.0;
    for (int P = -K; P <= trunc.P_max; ++P) {
        const double osc = special::xi(std::min(K, K + P), std::abs(P), alpha);
        if (osc == 0.0) continue;
        for (int p = -trunc.p_max; p <= trunc.p_max; ++p) {
            if (p == excluded_p && P == excluded_P) continue;
            const double coupling = params.delta * bessel(std::abs(p)) * osc;
            const double numerator = coupling * coupling;
            if (numerator == 0.0) continue;
            const double denominator = params.epsilon + p * params.omega_ex + osc_sign * P * params.Omega;
            if (std::abs(denominator) < trunc.denom_tol) {
                throw SmallDenominatorError(p, P, denominator);
            }
            sum += numerator / denominator;
        }
    }
    return sum;
}

EffectiveBlock effective_block(const ResonanceIndex& index, const SystemParams& params, const Truncation& trunc,
                               const VanVleckOptions& options) {
    require_normalized(index);
    params.validate();
    const auto [m, L, n, K] = index;

    EffectiveBlock block;
    block.index = index;
    block.e_up = delta0_quasienergy(Spin::up, n, K, params);
    block.e_down = delta0_quasienergy(Spin::down, n + m, K + L, params);
    if (options.second_order) {
        block.e_up -= 0.25 * second_order_shift(Spin::up, n, K, m, L, params, trunc, options.convention);
        block.e_down += 0.25 * second_order_shift(Spin::down, n + m, K + L, m, L, params, trunc, options.convention);
    }
    block.coupling = 0.5 * parity(L + 1) * special::dressed_delta(-m, params.delta, params.A, params.omega_ex) *
                     special::xi(K, L, params.alpha());
    return block;
}

std::pair<QuasienergyLevel, QuasienergyLevel> quasienergies(const ResonanceIndex& index, const SystemParams& params,
                                                            const Truncation& trunc, const VanVleckOptions& options) {
    const EffectiveBlock block = effective_block(index, params, trunc, options);
    const double mean = 0.5 * (block.e_up + block.e_down);
    const double half_gap = 0.5 * std::hypot(block.e_down - block.e_up, 2.0 * block.coupling);
    return {QuasienergyLevel{mean - half_gap, Branch::minus, index},
            QuasienergyLevel{mean + half_gap, Branch::plus, index}};
}

std::vector<QuasienergyLevel> uncoupled_levels(int m, int L, int n, const SystemParams& params,
                                               const Truncation& trunc, const VanVleckOptions& options) {
    if (L < 0) {
        throw DomainError("uncoupled_levels: L must be >= 0; normalize() the index first");
    }
    std::vector<QuasienergyLevel> out;
    out.reserve(static_cast<std::size_t>(L));
    for (int K = 0; K < L; ++K) {
        double value = delta0_quasienergy(Spin::down, n + m, K, params);
        if (options.second_order) {
            value += 0.25 * second_order_shift(Spin::down, n + m, K, m, L, params, trunc, options.convention);
        }
        out.push_back({value, Branch::uncoupled_down, ResonanceIndex{m, L, n, K}});
    }
    return out;
}

double dressed_gap(const ResonanceIndex& index, const SystemParams& params, const Truncation& trunc,
                   const VanVleckOptions& options) {
    const EffectiveBlock block = effective_block(index, params, trunc, options);
    return std::hypot(block.e_down - block.e_up, 2.0 * block.coupling);
}

std::pair<MixingVector, MixingVector> block_eigenvectors(const EffectiveBlock& block) {
    const double h = 0.5 * (block.e_down - block.e_up);
    const double c = block.coupling;
    if (c == 0.0) {
        if (h < 0.0) {
            return {MixingVector{0.0, 1.0}, MixingVector{1.0, 0.0}};
        }
        return {MixingVector{1.0, 0.0}, MixingVector{0.0, 1.0}};
    }
    const double r = std::hypot(h, c);
    const double cos_theta = std::sqrt(std::max(0.0, (r + h) / (2.0 * r)));
    const double sin_theta = std::sqrt(std::max(0.0, (r - h) / (2.0 * r)));
    const double s = c > 0.0 ? 1.0 : -1.0;
    return {MixingVector{cos_theta, -s * sin_theta}, MixingVector{s * sin_theta, cos_theta}};
}

Eigen::VectorXcd FloquetState::at_time() const {
    const int nk = k_max + 1;
    Eigen::VectorXcd phases(2 * l_max + 1);
    for (int l = -l_max; l <= l_max; ++l) {
        phases(l + l_max) = std::polar(1.0, -l * omega_ex * t);
    }
    Eigen::VectorXcd out(2 * nk);
    for (int s = 0; s < 2; ++s) {
        for (int K = 0; K < nk; ++K) {
            const Eigen::Index row = static_cast<Eigen::Index>(s) * nk + K;
            out(row) = coeffs.segment(row * (2 * l_max + 1), 2 * l_max + 1).cast<std::complex<double>>().dot(phases);
        }
    }
    return out;
}

FloquetState floquet_mode(const ResonanceIndex& index, Branch branch, const SystemParams& params,
                          const Truncation& trunc, double t, const VanVleckOptions& options) {
    require_normalized(index);
    params.validate();
    trunc.validate();
    if (!std::isfinite(t)) {
        throw DomainError("floquet_mode: t must be finite");
    }
    const auto [m, L, n, K] = index;

    FloquetState state;
    state.k_max = trunc.k_max;
    state.l_max = trunc.l_max;
    state.omega_ex = params.omega_ex;
    state.t = t;
    state.index = index;
    state.branch = branch;
    state.coeffs = Eigen::VectorXd::Zero(2 * (trunc.k_max + 1) * (2 * trunc.l_max + 1));

    const double x = 0.5 * params.drive_ratio();
    const int max_order = std::max(std::abs(n), std::abs(n + m)) + trunc.l_max;
    const Eigen::VectorXd bessel = special::bessel_j_table(max_order, x);
    auto J = [&](int order) {
        const double v = bessel(std::abs(order));
        return (order < 0 && (-order) % 2 == 1) ? -v : v;
    };

    double k_leak = 0.0;
    double l_leak = 0.0;
    // |spin~, floquet_n, fock> = displaced Fock state times the driven-qubit
    // Fourier series, lambda = -g/Omega for up and +g/Omega for down.
    auto add_dressed = [&](Spin spin, int floquet_n, int fock, double weight) {
        if (weight == 0.0) return;
        const double lambda = (spin == Spin::up ? -1.0 : 1.0) * params.g / params.Omega;
        double k_norm = 0.0;
        double l_norm = 0.0;
        for (int l = -trunc.l_max; l <= trunc.l_max; ++l) {
            const double j = spin == Spin::up ? J(floquet_n - l) : J(l - floquet_n);
            l_norm += j * j;
        }
        for (int Kp = 0; Kp <= trunc.k_max; ++Kp) {
            const double ov = special::displacement_overlap(Kp, fock, lambda);
            k_norm += ov * ov;
            if (ov == 0.0) continue;
            for (int l = -trunc.l_max; l <= trunc.l_max; ++l) {
                const double j = spin == Spin::up ? J(floquet_n - l) : J(l - floquet_n);
                state.coeffs(state.offset(spin, Kp, l)) += weight * ov * j;
            }
        }
        k_leak = std::max(k_leak, 1.0 - k_norm);
        l_leak = std::max(l_leak, 1.0 - l_norm);
    };

    if (branch == Branch::uncoupled_down) {
        if (K >= L) {
            throw DomainError("floquet_mode: uncoupled_down requires K < L");
        }
        add_dressed(Spin::down, n + m, K, 1.0);
    } else {
        const EffectiveBlock block = effective_block(index, params, trunc, options);
        const auto [minus, plus] = block_eigenvectors(block);
        const MixingVector v = branch == Branch::minus ? minus : plus;
        add_dressed(Spin::up, n, K, v.up);
        add_dressed(Spin::down, n + m, K + L, v.down);
    }

    const double norm2 = state.coeffs.squaredNorm();
    if (norm2 < 1.0 - 1e-6) {
        if (k_leak >= l_leak) {
            throw TruncationError("k_max", 1.0 - norm2);
        }
        throw TruncationError("l_max", 1.0 - norm2);
    }
    return state;
}

} // namespace qosc
