#pragma once

// Tavis-Cummings cavity models: n two-level atoms and one truncated cavity mode.
//
// Basis convention for the full space: photon number is the major index and
// the atomic configuration the minor one. Atomic configurations are bit
// strings read left to right as atom 1 .. atom n, ordered lexicographically,
// so for two atoms the order is |00>, |01>, |10>, |11> and |10> means atom 1
// excited. Full index = photon * 2^n + atomic index.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "darkcav/numerics.hpp"

namespace darkcav {

struct AtomParams {
    double omega = 1.0;  ///< transition angular frequency
    double g = 0.0;      ///< coupling to the cavity mode, real and >= 0
    std::optional<double> position;  ///< along the cavity axis, SI metres
};

struct CavityModel {
    double omega_c = 1.0;
    std::vector<AtomParams> atoms;
    int photon_cutoff = 1;  ///< highest Fock number kept
    bool rwa = true;

    std::size_t n_atoms() const { return atoms.size(); }
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const CavityModel& m);

struct ModelDiagnostics {
    std::vector<double> detunings;        ///< omega_c - omega_i
    std::vector<double> coupling_ratios;  ///< g_i / omega_c
    double max_relative_detuning = 0.0;   ///< max |d_i| / omega_c
    double max_coupling_ratio = 0.0;
};

ModelDiagnostics diagnostics(const CavityModel& m);

struct BasisLabel {
    int photon_number = 0;
    std::uint32_t atomic_bits = 0;  ///< bit (n-1-i) set <=> atom i excited

    bool atom_excited(std::size_t atom, std::size_t n_atoms) const {
        return (atomic_bits >> (n_atoms - 1 - atom)) & 1U;
    }
    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

Eigen::Index basis_index(const BasisLabel& label, std::size_t n_atoms);
BasisLabel basis_label(Eigen::Index index, std::size_t n_atoms);
/// e.g. "|1>_p|00>_a"
std::string to_string(const BasisLabel& label, std::size_t n_atoms);

inline constexpr std::size_t kMaxAtoms = 12;
inline constexpr Eigen::Index kMaxFullDimension = 65536;

Eigen::Index full_dimension(const CavityModel& m);

/// H/hbar on the truncated Fock space times all atomic configurations.
ComplexMatrixXd build_full_hamiltonian(const CavityModel& m);

/// Full-basis indices of the single-excitation states, in block order:
/// atom 1 excited, ..., atom n excited, then one photon with all atoms down.
std::vector<Eigen::Index> single_excitation_indices(std::size_t n_atoms);

/// Restriction of the RWA Hamiltonian to the single-excitation sector.
ComplexMatrixXd single_excitation_block(const CavityModel& m);

/// Sub-matrix of m on the given rows/columns, in the given order.
ComplexMatrixXd extract_block(const ComplexMatrixXd& m, const std::vector<Eigen::Index>& indices);

/// Copy of m with atom `atom_index` (0-based) shifted by omega += ds, g += dg.
CavityModel apply_zs_shift(const CavityModel& m, std::size_t atom_index, double ds, double dg);

/// a^dag a + sum_i sigma_i^+ sigma_i^- on the full basis (diagonal).
ComplexMatrixXd excitation_number_operator(const CavityModel& m);

/// sum_i g_i sigma_i^- on the 2^n-dimensional atomic space.
ComplexMatrixXd collective_lowering(const std::vector<double>& couplings);
/// sum_i g_i sigma_i^+ on the 2^n-dimensional atomic space.
ComplexMatrixXd collective_raising(const std::vector<double>& couplings);

std::vector<double> couplings_of(const CavityModel& m);

namespace si {
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double epsilon0 = 8.8541878128e-12;
inline constexpr double c = 299792458.0;
}  // namespace si

/// Cavity length pi c / omega_c for an SI angular frequency.
double cavity_length(double omega_c);

/// Vacuum Rabi coupling d_a E0 sin(omega_c x / c) / hbar in rad/s, with
/// E0 = sqrt(hbar omega_c / (2 eps0 V)). Throws unless 0 <= x <= length.
double coupling_from_position(double x, double length, double omega_c, double dipole_moment, double volume);

}  // namespace darkcav
