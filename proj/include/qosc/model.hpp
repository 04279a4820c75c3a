// model.hpp — physical parameters, resonance labels, truncation settings and
// resonance bookkeeping for the driven qubit-oscillator system
//
//   H(t) = -1/2 [(eps + A cos w_ex t) sigma_z + Delta sigma_x]
//          + g sigma_z (B^dag + B) + Omega B^dag B,      hbar = 1.
//
// All parameters are angular frequencies in one user-chosen unit.

#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace qosc {

enum class Spin { up, down };

inline constexpr double spin_sign(Spin s) noexcept { return s == Spin::up ? 1.0 : -1.0; }

struct SystemParams {
    double epsilon{0.0};   // static bias
    double delta{0.0};     // tunneling splitting
    double g{0.0};         // qubit-oscillator coupling
    double Omega{1.0};     // oscillator frequency
    double A{0.0};         // drive amplitude
    double omega_ex{1.0};  // drive frequency

    // Throws DomainError unless Omega, omega_ex > 0 and delta, g, A >= 0.
    void validate() const;

    // alpha = (2 g / Omega)^2
    double alpha() const noexcept { return (2.0 * g / Omega) * (2.0 * g / Omega); }
    double drive_ratio() const noexcept { return A / omega_ex; }
    double drive_period() const noexcept;
};

// Labels of a resonant doublet |up, n, K> <-> |down, n + m, K + L>.
struct ResonanceIndex {
    int m{0};
    int L{0};
    int n{0};
    int K{0};

    friend bool operator==(const ResonanceIndex&, const ResonanceIndex&) = default;
};

struct NormalizedIndex {
    ResonanceIndex index;
    bool spin_flipped{false};
};

// Maps an index with L < 0 onto the L >= 0 form by exchanging the spin
// labels. The exchanged problem has the bias reversed (see flip_spin).
// Idempotent. Throws DomainError when the index names a negative Fock state.
NormalizedIndex normalize(const ResonanceIndex& index);

// Parameters of the spin-exchanged problem: sigma_x H sigma_x combined with
// the oscillator parity B -> -B and a half-period time shift maps
// (eps, A, g) onto (-eps, A, g).
SystemParams flip_spin(const SystemParams& params);

struct Truncation {
    int k_max{20};           // Fock cutoff, K in [0, k_max]
    int l_max{40};           // Fourier cutoff, l in [-l_max, l_max]
    int p_max{30};           // photon range of the second-order sum
    int P_max{30};           // oscillator range of the second-order sum
    double denom_tol{1e-6};  // small-denominator guard (absolute)

    // Throws DomainError unless all cutoffs are >= 1 and denom_tol > 0.
    void validate() const;

    // Defaults with the guard expressed as 1e-6 omega_ex.
    static Truncation standard(const SystemParams& params);
};

// eps - m omega_ex + L Omega
double resonance_detuning(const SystemParams& params, int m, int L);

struct Interval {
    double lo{0.0};
    double hi{0.0};
};

struct IntRange {
    int lo{0};
    int hi{0};
};

struct Resonance {
    int m{0};
    int L{0};
    double eps_star{0.0};  // m omega_ex - L Omega
    bool overlaps{false};  // another listed resonance lies within `window`
};

// All (m, L), L in [0, L_max], whose crossing bias lies in eps_range,
// sorted by eps_star (ties by L, then m).
std::vector<Resonance> find_resonances(const SystemParams& params, Interval eps_range, IntRange m_range,
                                       int L_max, double window);

// Resonance with the smallest |detuning| at the current bias.
Resonance nearest_resonance(const SystemParams& params, IntRange m_range, int L_max);

// Smallest (j, N) with |Omega/omega_ex - j/N| < 1e-9 and N <= max_denominator.
std::optional<std::pair<int, int>> commensurability_check(double Omega, double omega_ex, int max_denominator);

} // namespace qosc
