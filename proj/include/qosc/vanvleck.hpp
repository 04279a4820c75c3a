// vanvleck.hpp — analytic quasienergies of the driven qubit-oscillator system
//
// The Delta = 0 problem is solved exactly by Floquet states of the driven
// qubit dressed with spin-dependent oscillator displacements. Finite Delta is
// treated by Van Vleck perturbation theory: states degenerate at
// eps = m omega_ex - L Omega form 2x2 blocks coupled by the dressed tunneling
// element, and all other couplings enter at second order as energy shifts.

#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "qosc/model.hpp"

namespace qosc {

// Sign of P Omega in the second-order denominators eps + p omega_ex (+/-) P Omega.
//   spin_locked: +P Omega for spin up, -P Omega for spin down (default; matches
//                the energy differences of the coupled states)
//   spin_reversed: the opposite assignment, kept for the regression comparison
enum class ShiftConvention { spin_locked, spin_reversed };

enum class Branch { minus, plus, uncoupled_down };

const char* to_string(Branch b) noexcept;

struct VanVleckOptions {
    bool second_order{true};
    ShiftConvention convention{ShiftConvention::spin_locked};
};

// Exact Delta = 0 quasienergy: -/+ eps/2 - n omega_ex + K Omega - g^2/Omega.
double delta0_quasienergy(Spin spin, int n, int K, const SystemParams& params);

// <down~, n, K| Delta sigma_x |up~, n_p, K_p>
//   = [sign(K_p - K)]^{|K_p - K|} Delta_{n_p - n} xi^{|K_p - K|}_{min(K, K_p)}(alpha)
double dressed_coupling(int n, int K, int n_p, int K_p, const SystemParams& params);

// Truncated second-order sum for the state (spin, n, K) belonging to the
// (m, L) doublet. The term reaching the doublet partner is excluded.
// Throws SmallDenominatorError for a retained denominator below denom_tol.
double second_order_shift(Spin spin, int n, int K, int m, int L, const SystemParams& params,
                          const Truncation& trunc, ShiftConvention convention = ShiftConvention::spin_locked);

struct EffectiveBlock {
    double e_up{0.0};      // E_up(n, K) - eps2_up / 4
    double e_down{0.0};    // E_down(n+m, K+L) + eps2_down / 4
    double coupling{0.0};  // (-1)^{L+1}/2 Delta_{-m} xi_K^L(alpha)
    ResonanceIndex index;

    Eigen::Matrix2d matrix() const {
        Eigen::Matrix2d h;
        h << e_up, coupling, coupling, e_down;
        return h;
    }
};

EffectiveBlock effective_block(const ResonanceIndex& index, const SystemParams& params, const Truncation& trunc,
                               const VanVleckOptions& options = {});

struct QuasienergyLevel {
    double value{0.0};
    Branch branch{Branch::minus};
    ResonanceIndex index;
};

// Closed-form eigenvalues of the effective block, minus <= plus.
std::pair<QuasienergyLevel, QuasienergyLevel> quasienergies(const ResonanceIndex& index, const SystemParams& params,
                                                            const Truncation& trunc,
                                                            const VanVleckOptions& options = {});

// The L spin-down states |down, n+m, K>, K < L, left without a partner.
std::vector<QuasienergyLevel> uncoupled_levels(int m, int L, int n, const SystemParams& params,
                                               const Truncation& trunc, const VanVleckOptions& options = {});

// Dressed oscillation frequency (avoided-crossing width)
//   sqrt([eps - m w + L Omega + (eps2_down + eps2_up)/4]^2 + [Delta_{-m} xi_K^L]^2).
// With options.second_order == false the shift terms are dropped.
double dressed_gap(const ResonanceIndex& index, const SystemParams& params, const Truncation& trunc,
                   const VanVleckOptions& options = {});

// Components of an eigenvector of an effective block on (up, down).
struct MixingVector {
    double up{0.0};
    double down{0.0};
};

// Eigenvectors of a real symmetric 2x2 block. `minus` belongs to the lower
// eigenvalue and has a non-negative up component; it is the up state when the
// down diagonal lies far above. Degenerate uncoupled blocks return pure states.
std::pair<MixingVector, MixingVector> block_eigenvectors(const EffectiveBlock& block);

// Floquet mode expanded in the bare Sambe basis (spin, K', l), ordered
// lexicographically like the numerical Sambe matrix.
struct FloquetState {
    Eigen::VectorXd coeffs;
    int k_max{0};
    int l_max{0};
    double omega_ex{1.0};
    double t{0.0};
    ResonanceIndex index;
    Branch branch{Branch::minus};

    Eigen::Index offset(Spin spin, int K, int l) const noexcept {
        const int s = spin == Spin::up ? 0 : 1;
        return (static_cast<Eigen::Index>(s) * (k_max + 1) + K) * (2 * l_max + 1) + (l + l_max);
    }
    double coeff(Spin spin, int K, int l) const { return coeffs(offset(spin, K, l)); }

    // Physical state at time t on (spin, K'): sum_l c(spin, K', l) e^{-i l omega_ex t}.
    Eigen::VectorXcd at_time() const;
};

// Mode of the (index, branch) eigenstate at time t. For uncoupled_down the
// index K must satisfy K < L and the state is |down~, n+m, K>.
// Throws TruncationError if the squared norm falls below 1 - 1e-6.
FloquetState floquet_mode(const ResonanceIndex& index, Branch branch, const SystemParams& params,
                          const Truncation& trunc, double t, const VanVleckOptions& options = {});

} // namespace qosc
