#pragma once

// Dark states of two-level atoms in a cavity.
//
// Closed-form eigenstructure of the three-state single-excitation block
//
//     H1 = [[w1, 0,  g1],
//           [0,  w2, g2],
//           [g1, g2, wc]]     basis (|0>_p|10>_a, |0>_p|01>_a, |1>_p|00>_a)
//
// in the unshifted (w1 == w2) and shifted (w1 != w2) cases, singlet-product
// factories, and an operational darkness test.

#include <array>
#include <optional>
#include <vector>

#include "darkcav/model.hpp"
#include "darkcav/numerics.hpp"

namespace darkcav {

enum class Branch {
    degenerate,               ///< w1 == w2, closed-form S-eigenstructure
    shifted,                  ///< w1 != w2, cubic roots + closed-form vectors
    shifted_numeric_fallback  ///< shifted, but at least one vector taken from herm_eig
};

const char* to_string(Branch b);

/// Relative window |w1 - w2| <= kDegenerateTolerance * wc that selects the degenerate branch.
inline constexpr double kDegenerateTolerance = 1e-9;

struct AnalyticSpectrum {
    std::array<double, 3> eigenvalues{};  ///< ascending
    std::array<StateVectorXd, 3> eigenvectors;  ///< normalized, phase-fixed
    /// Unnormalized closed forms in the same order: (-g2, g1, 0) for the dark
    /// vector, third component 1 otherwise. Empty where a numeric fallback was used.
    std::array<StateVectorXd, 3> raw_vectors;
    std::array<bool, 3> numeric_fallback{};
    Branch branch = Branch::degenerate;
    /// Position of the (-g2, g1, 0) vector; degenerate branch with nonzero couplings only.
    std::optional<std::size_t> dark_index;
};

/// H1 in the block basis above.
ComplexMatrixXd three_level_block(double omega_c, double omega_a1, double omega_a2, double g1, double g2);

/// (-g2, g1)/sqrt(g1^2 + g2^2) over (|10>, |01>). Throws when both couplings vanish.
StateVectorXd dark_state_degenerate(double g1, double g2);

/// Same state as a 3-vector of the block basis (photon amplitude 0).
StateVectorXd dark_state_block(double g1, double g2);

AnalyticSpectrum analytic_spectrum_degenerate(double omega_c, double omega_a, double g1, double g2);

/// Coefficients (A, B, C) of x^3 + A x^2 + B x + C = det(x - H1).
std::array<double, 3> shifted_cubic_coefficients(double omega_c, double omega_a1, double omega_a2, double g1,
                                                 double g2);

/// Closed-form eigenvector of H1 for eigenvalue alpha, third component 1:
///     ( (alpha - wc)/g1 - g2^2 / (g1 (alpha - w2)),  g2 / (alpha - w2),  1 )
/// Singular when g1 == 0 or alpha == w2.
StateVectorXd shifted_eigenvector_raw(double omega_c, double omega_a2, double g1, double g2, double alpha);

/// Throws std::invalid_argument when w1 and w2 fall in the degenerate window.
AnalyticSpectrum analytic_spectrum_shifted(double omega_c, double omega_a1, double omega_a2, double g1, double g2);

/// Picks the branch from |w1 - w2|.
AnalyticSpectrum analytic_spectrum(double omega_c, double omega_a1, double omega_a2, double g1, double g2);

/// Normalized product of (n/2) pair states over atoms (1,2), (3,4), ...
/// With empty `couplings` every pair is the singlet (|01> - |10>)/sqrt(2);
/// otherwise `couplings` holds one g per atom and pair j is
/// dark_state_degenerate(g_{2j-1}, g_{2j}). Returns a 2^n atomic-sector vector.
StateVectorXd singlet_ensemble(std::size_t n, const std::vector<double>& couplings = {});

/// Spreads single-excitation amplitudes (atom 1..n) into the 2^n atomic sector.
StateVectorXd embed_single_excitation(const StateVectorXd& amplitudes);

enum class Subspace { single_excitation, full };

const char* to_string(Subspace s);

struct DarknessReport {
    bool is_dark = false;
    double emit_residual = 0.0;    ///< |sum_i g_i sigma_i^- psi_atomic|
    double absorb_residual = 0.0;  ///< |sum_i g_i sigma_i^+ psi_atomic|
    double photon_support = 0.0;   ///< probability outside the vacuum photon sector
    double atomic_excitation = 0.0;  ///< probability of atomic states other than all-ground
    Subspace subspace = Subspace::single_excitation;
};

/// Darkness of psi with respect to the model's couplings.
///
/// single_excitation: psi has n+1 components in block order; dark means the
/// emission residual and photon support are within tolerance.
/// full: psi is either a 2^n atomic vector (vacuum photon implied) or a full
/// (n_max+1) 2^n vector; dark additionally requires the absorption residual
/// within tolerance. Residuals are compared against tol * max_i g_i, photon
/// support against tol. The all-ground state is never dark.
DarknessReport is_dark(const CavityModel& m, const StateVectorXd& psi, Subspace subspace, double tol);

struct DarkState {
    StateVectorXd state;  ///< in the representation of the searched subspace
    double energy = 0.0;
    DarknessReport report;
};

/// Dark eigenstates of the model's Hamiltonian (single-excitation block or
/// the full truncated Hamiltonian). Inside a degenerate eigenvalue cluster
/// the search rotates to the combinations least coupled to the photon.
std::vector<DarkState> find_dark_states(const CavityModel& m, Subspace subspace, double tol);

}  // namespace darkcav
