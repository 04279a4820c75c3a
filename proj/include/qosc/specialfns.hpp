// specialfns.hpp — Bessel functions, generalized Laguerre polynomials and the
// oscillator / drive dressing factors built from them.
//
// Everything here is header-only and templated on the floating-point scalar.
// All functions are pure.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "qosc/errors.hpp"

namespace qosc::special {

// Largest |order| accepted by the Bessel routines.
inline constexpr int kMaxBesselOrder = 10000;

// First positive zero of J_0.
inline constexpr double kBesselJ0FirstZero = 2.4048255576957728;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Scalar>
void require_finite(Scalar x, const char* what) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + ": argument must be finite");
    }
}

// Starting order for Miller's downward recurrence.
inline int miller_start(int n_max, double ax) {
    const double reach = std::max(static_cast<double>(n_max), ax);
    int start = static_cast<int>(reach) + 20 + static_cast<int>(std::sqrt(160.0 * std::max(reach, 1.0)));
    return start + (start % 2);
}

} // namespace detail

// J_0(x) ... J_{n_max}(x) via Miller's normalized downward recurrence.
// Stable for orders above and below the argument; absolute accuracy is
// ~1e-15 for |x| <= 50.
template <typename Scalar>
Vector<Scalar> bessel_j_table(int n_max, Scalar x) {
    detail::require_finite(x, "bessel_j");
    if (n_max < 0 || n_max > kMaxBesselOrder) {
        throw DomainError("bessel_j: order outside [0, " + std::to_string(kMaxBesselOrder) + "]");
    }
    Vector<Scalar> out = Vector<Scalar>::Zero(n_max + 1);
    const Scalar ax = std::abs(x);
    if (ax == Scalar(0)) {
        out(0) = Scalar(1);
        return out;
    }

    const int start = detail::miller_start(n_max, static_cast<double>(ax));
    const Scalar big = Scalar(1e250);
    const Scalar rescale = Scalar(1e-250);
    const Scalar two_over_x = Scalar(2) / ax;

    Scalar j_above = Scalar(0);      // J_{k+1}
    Scalar j_here = Scalar(1e-30);   // J_k, arbitrary start
    Scalar even_sum = Scalar(0);     // J_0 + 2 sum J_{2k}, unnormalized
    for (int k = start; k > 0; --k) {
        const Scalar j_below = Scalar(k) * two_over_x * j_here - j_above;
        j_above = j_here;
        j_here = j_below;  // now J_{k-1}
        if (k <= n_max) {
            out(k) = j_above;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) {
            even_sum += Scalar(2) * j_here;
        }
        if (std::abs(j_here) > big) {
            j_here *= rescale;
            j_above *= rescale;
            even_sum *= rescale;
            for (int i = k; i <= n_max; ++i) {
                out(i) *= rescale;
            }
        }
    }
    out(0) = j_here;
    even_sum += j_here;
    out /= even_sum;

    if (x < Scalar(0)) {
        for (int k = 1; k <= n_max; k += 2) {
            out(k) = -out(k);
        }
    }
    return out;
}

// Integer-order Bessel function of the first kind.
template <typename Scalar>
Scalar bessel_j(int order, Scalar x) {
    const int n = order < 0 ? -order : order;
    const Scalar value = bessel_j_table(n, x)(n);
    return (order < 0 && n % 2 == 1) ? -value : value;
}

// Generalized Laguerre polynomial returned as mantissa * exp(log_scale); the
// scale absorbs overflow of the three-term recurrence for large K.
template <typename Scalar>
struct ScaledValue {
    Scalar mantissa;
    Scalar log_scale;

    Scalar value() const { return mantissa * std::exp(log_scale); }
};

template <typename Scalar>
ScaledValue<Scalar> laguerre_scaled(int K, int L, Scalar x) {
    if (K < 0 || L < 0) {
        throw DomainError("laguerre: K and L must be non-negative");
    }
    detail::require_finite(x, "laguerre");
    Scalar log_scale = Scalar(0);
    Scalar prev = Scalar(1);  // L_0
    if (K == 0) {
        return {prev, log_scale};
    }
    Scalar cur = Scalar(1 + L) - x;  // L_1
    const Scalar big = Scalar(1e200);
    for (int k = 1; k < K; ++k) {
        const Scalar next = ((Scalar(2 * k + 1 + L) - x) * cur - Scalar(k + L) * prev) / Scalar(k + 1);
        prev = cur;
        cur = next;
        if (std::abs(cur) > big) {
            cur /= big;
            prev /= big;
            log_scale += std::log(big);
        }
    }
    return {cur, log_scale};
}

// L_K^{(L)}(x) by upward three-term recurrence in K.
template <typename Scalar>
Scalar laguerre(int K, int L, Scalar x) {
    return laguerre_scaled(K, L, x).value();
}

// Oscillator dressing
//   xi_K^L(alpha) = alpha^{L/2} sqrt(K!/(K+L)!) L_K^{(L)}(alpha) e^{-alpha/2},
// evaluated in log space.
template <typename Scalar>
Scalar xi(int K, int L, Scalar alpha) {
    if (K < 0 || L < 0) {
        throw DomainError("xi: K and L must be non-negative");
    }
    detail::require_finite(alpha, "xi");
    if (alpha < Scalar(0)) {
        throw DomainError("xi: alpha must be >= 0");
    }
    if (alpha == Scalar(0)) {
        return L == 0 ? Scalar(1) : Scalar(0);
    }
    const ScaledValue<Scalar> lag = laguerre_scaled(K, L, alpha);
    if (lag.mantissa == Scalar(0)) {
        return Scalar(0);
    }
    const Scalar log_mag = std::log(std::abs(lag.mantissa)) + lag.log_scale +
                           Scalar(0.5) * Scalar(L) * std::log(alpha) +
                           Scalar(0.5) * (std::lgamma(Scalar(K + 1)) - std::lgamma(Scalar(K + L + 1))) -
                           Scalar(0.5) * alpha;
    const Scalar mag = std::exp(log_mag);
    return lag.mantissa < Scalar(0) ? -mag : mag;
}

// Drive dressing Delta_m = Delta J_m(A / omega_ex).
template <typename Scalar>
Scalar dressed_delta(int m, Scalar delta, Scalar A, Scalar omega_ex) {
    if (!(omega_ex > Scalar(0))) {
        throw DomainError("dressed_delta: omega_ex must be > 0");
    }
    if (delta < Scalar(0)) {
        throw DomainError("dressed_delta: delta must be >= 0");
    }
    return delta * bessel_j(m, A / omega_ex);
}

// <K_row| exp{lambda (B^dag - B)} |K_col>. Real for real lambda; the matrix
// over (K_row, K_col) is orthogonal.
template <typename Scalar>
Scalar displacement_overlap(int K_row, int K_col, Scalar lambda) {
    if (K_row < 0 || K_col < 0) {
        throw DomainError("displacement_overlap: Fock indices must be non-negative");
    }
    detail::require_finite(lambda, "displacement_overlap");
    if (lambda == Scalar(0)) {
        return K_row == K_col ? Scalar(1) : Scalar(0);
    }
    const Scalar alpha = lambda * lambda;
    if (K_row >= K_col) {
        const int L = K_row - K_col;
        const Scalar mag = xi(K_col, L, alpha);
        return (lambda < Scalar(0) && L % 2 == 1) ? -mag : mag;
    }
    const int L = K_col - K_row;
    const Scalar mag = xi(K_row, L, alpha);
    return (lambda > Scalar(0) && L % 2 == 1) ? -mag : mag;
}

// Dense block of displacement overlaps, rows K_row in [0, rows), cols in [0, cols).
template <typename Scalar>
Matrix<Scalar> displacement_matrix(int rows, int cols, Scalar lambda) {
    Matrix<Scalar> out(rows, cols);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            out(r, c) = displacement_overlap(r, c, lambda);
        }
    }
    return out;
}

} // namespace qosc::special
