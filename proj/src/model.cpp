// model.cpp — parameter validation and resonance bookkeeping

#include "qosc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qosc/errors.hpp"

namespace qosc {

void SystemParams::validate() const {
    const double all[] = {epsilon, delta, g, Omega, A, omega_ex};
    for (double v : all) {
        if (!std::isfinite(v)) {
            throw DomainError("SystemParams: parameters must be finite");
        }
    }
    if (!(Omega > 0.0)) throw DomainError("SystemParams: Omega must be > 0");
    if (!(omega_ex > 0.0)) throw DomainError("SystemParams: omega_ex must be > 0");
    if (delta < 0.0) throw DomainError("SystemParams: delta must be >= 0");
    if (g < 0.0) throw DomainError("SystemParams: g must be >= 0");
    if (A < 0.0) throw DomainError("SystemParams: A must be >= 0");
}

double SystemParams::drive_period() const noexcept { return 2.0 * std::numbers::pi / omega_ex; }

NormalizedIndex normalize(const ResonanceIndex& index) {
    if (index.K < 0) {
        throw DomainError("ResonanceIndex: K must be >= 0");
    }
    if (index.L >= 0) {
        return {index, false};
    }
    // |up, n, K> <-> |down, n+m, K+L>: the down member becomes the up member
    // of the exchanged problem.
    const ResonanceIndex flipped{-index.m, -index.L, index.n + index.m, index.K + index.L};
    if (flipped.K < 0) {
        throw DomainError("ResonanceIndex: partner state K + L is negative");
    }
    return {flipped, true};
}

SystemParams flip_spin(const SystemParams& params) {
    SystemParams out = params;
    out.epsilon = -params.epsilon;
    return out;
}

void Truncation::validate() const {
    if (k_max < 1 || l_max < 1 || p_max < 1 || P_max < 1) {
        throw DomainError("Truncation: all cutoffs must be >= 1");
    }
    if (!(denom_tol > 0.0)) {
        throw DomainError("Truncation: denom_tol must be > 0");
    }
}

Truncation Truncation::standard(const SystemParams& params) {
    Truncation t;
    t.denom_tol = 1e-6 * params.omega_ex;
    return t;
}

double resonance_detuning(const SystemParams& params, int m, int L) {
    return params.epsilon - m * params.omega_ex + L * params.Omega;
}

std::vector<Resonance> find_resonances(const SystemParams& params, Interval eps_range, IntRange m_range,
                                       int L_max, double window) {
    if (!(window > 0.0)) {
        throw DomainError("find_resonances: window must be > 0");
    }
    std::vector<Resonance> out;
    if (eps_range.hi < eps_range.lo || m_range.hi < m_range.lo || L_max < 0) {
        return out;
    }
    for (int L = 0; L <= L_max; ++L) {
        for (int m = m_range.lo; m <= m_range.hi; ++m) {
            const double eps_star = m * params.omega_ex - L * params.Omega;
            if (eps_star >= eps_range.lo && eps_star <= eps_range.hi) {
                out.push_back({m, L, eps_star, false});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
        if (a.eps_star != b.eps_star) return a.eps_star < b.eps_star;
        if (a.L != b.L) return a.L < b.L;
        return a.m < b.m;
    });
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        if (out[i + 1].eps_star - out[i].eps_star < window) {
            out[i].overlaps = true;
            out[i + 1].overlaps = true;
        }
    }
    return out;
}

Resonance nearest_resonance(const SystemParams& params, IntRange m_range, int L_max) {
    if (m_range.hi < m_range.lo || L_max < 0) {
        throw ConfigError("nearest_resonance: empty search range");
    }
    Resonance best{};
    double best_abs = std::numeric_limits<double>::infinity();
    for (int L = 0; L <= L_max; ++L) {
        for (int m = m_range.lo; m <= m_range.hi; ++m) {
            const double d = std::abs(resonance_detuning(params, m, L));
            if (d < best_abs - 1e-15) {
                best_abs = d;
                best = {m, L, m * params.omega_ex - L * params.Omega, false};
            }
        }
    }
    return best;
}

std::optional<std::pair<int, int>> commensurability_check(double Omega, double omega_ex, int max_denominator) {
    if (!(Omega > 0.0) || !(omega_ex > 0.0)) {
        throw DomainError("commensurability_check: frequencies must be > 0");
    }
    if (max_denominator < 1) {
        throw DomainError("commensurability_check: max_denominator must be >= 1");
    }
    const double ratio = Omega / omega_ex;
    for (int N = 1; N <= max_denominator; ++N) {
        const double j = std::round(ratio * N);
        if (j >= 1.0 && std::abs(ratio - j / N) < 1e-9) {
            return std::make_pair(static_cast<int>(j), N);
        }
    }
    return std::nullopt;
}

} // namespace qosc
