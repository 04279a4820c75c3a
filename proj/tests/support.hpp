// support.hpp — parameter sets and level-matching helpers shared by the unit
// tests and the acceptance binary

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include "qosc/floquet_numeric.hpp"
#include "qosc/model.hpp"
#include "qosc/specialfns.hpp"
#include "qosc/vanvleck.hpp"

namespace qosc::testing {

// Quasienergy-spectrum point: omega_ex = 1, Omega = sqrt(2) omega_ex.
inline SystemParams spectrum_params(double epsilon = 0.0, double delta = 0.2) {
    SystemParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.g = 0.05;
    p.Omega = std::sqrt(2.0);
    p.A = 2.0;
    p.omega_ex = 1.0;
    return p;
}

// Cutoffs for the spectrum point: six Fock states, Fourier range set by the
// decay of J_n(A / omega_ex = 2).
inline Truncation spectrum_trunc() {
    Truncation t;
    t.k_max = 5;
    t.l_max = 15;
    t.p_max = 30;
    t.P_max = 30;
    t.denom_tol = 1e-6;
    return t;
}

// Dynamics point: Omega = 1, Delta = 0.4, omega_ex = 5.3, A = 8.
inline SystemParams dynamics_params(double g, double A = 8.0) {
    SystemParams p;
    p.epsilon = 0.0;
    p.delta = 0.4;
    p.g = g;
    p.Omega = 1.0;
    p.A = A;
    p.omega_ex = 5.3;
    return p;
}

// Fock cutoff that holds the displaced states of a coupling g / Omega.
inline int dynamics_k_max(double g) { return g < 0.3 ? 10 : (g < 0.7 ? 16 : 30); }

// Unfolded Sambe eigenvalue closest to `target`.
inline double nearest_eigenvalue(const Eigen::VectorXd& evals, double target) {
    Eigen::Index best = 0;
    (evals.array() - target).abs().minCoeff(&best);
    return evals(best);
}

// Indices of the two numeric eigenvalues matched to an analytic pair.
inline std::pair<double, double> matched_pair(const Eigen::VectorXd& evals, double lo, double hi) {
    Eigen::Index i_lo = 0;
    Eigen::Index i_hi = 0;
    (evals.array() - lo).abs().minCoeff(&i_lo);
    (evals.array() - hi).abs().minCoeff(&i_hi);
    if (i_lo == i_hi) {
        // Both analytic levels closest to one eigenvalue; take its neighbour
        // on the side of the other analytic level.
        if (i_hi + 1 < evals.size()) ++i_hi;
        else --i_lo;
    }
    return {evals(i_lo), evals(i_hi)};
}

// Golden-section minimization of f on [a, b].
inline std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b,
                                            double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

// Zero of the effective-block diagonal difference e_down - e_up near the
// nominal crossing (the second-order-corrected crossing bias), by secant steps.
inline double corrected_crossing(const ResonanceIndex& index, SystemParams params, const Truncation& trunc,
                                 const VanVleckOptions& options = {}) {
    const double nominal = index.m * params.omega_ex - index.L * params.Omega;
    auto diff = [&](double eps) {
        params.epsilon = eps;
        const EffectiveBlock b = effective_block(index, params, trunc, options);
        return b.e_down - b.e_up;
    };
    double x0 = nominal;
    double x1 = nominal + 1e-3;
    double f0 = diff(x0);
    double f1 = diff(x1);
    for (int it = 0; it < 50 && std::abs(f1) > 1e-14; ++it) {
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = diff(x1);
    }
    return x1;
}

} // namespace qosc::testing
