#include "darkcav/model.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace darkcav {

namespace {

std::uint32_t atom_mask(std::size_t atom, std::size_t n_atoms) {
    return 1U << (n_atoms - 1 - atom);
}

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

}  // namespace

void validate(const CavityModel& m) {
    require(std::isfinite(m.omega_c) && m.omega_c > 0.0, "omega_c must be positive and finite");
    require(m.photon_cutoff >= 1, "photon_cutoff must be >= 1");
    require(!m.atoms.empty(), "model needs at least one atom");
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
        const auto& a = m.atoms[i];
        const std::string tag = "atom " + std::to_string(i + 1) + ": ";
        require(std::isfinite(a.omega) && a.omega > 0.0, tag + "omega must be positive and finite");
        require(std::isfinite(a.g) && a.g >= 0.0, tag + "g must be non-negative and finite");
    }
}

ModelDiagnostics diagnostics(const CavityModel& m) {
    ModelDiagnostics d;
    for (const auto& a : m.atoms) {
        d.detunings.push_back(m.omega_c - a.omega);
        d.coupling_ratios.push_back(a.g / m.omega_c);
        d.max_relative_detuning = std::max(d.max_relative_detuning, std::abs(m.omega_c - a.omega) / m.omega_c);
        d.max_coupling_ratio = std::max(d.max_coupling_ratio, a.g / m.omega_c);
    }
    return d;
}

Eigen::Index basis_index(const BasisLabel& label, std::size_t n_atoms) {
    return static_cast<Eigen::Index>(label.photon_number) * (Eigen::Index{1} << n_atoms) + label.atomic_bits;
}

BasisLabel basis_label(Eigen::Index index, std::size_t n_atoms) {
    const Eigen::Index block = Eigen::Index{1} << n_atoms;
    return {static_cast<int>(index / block), static_cast<std::uint32_t>(index % block)};
}

std::string to_string(const BasisLabel& label, std::size_t n_atoms) {
    std::string s = "|" + std::to_string(label.photon_number) + ">_p|";
    for (std::size_t i = 0; i < n_atoms; ++i) {
        s += label.atom_excited(i, n_atoms) ? '1' : '0';
    }
    return s + ">_a";
}

Eigen::Index full_dimension(const CavityModel& m) {
    return static_cast<Eigen::Index>(m.photon_cutoff + 1) * (Eigen::Index{1} << m.n_atoms());
}

ComplexMatrixXd build_full_hamiltonian(const CavityModel& m) {
    validate(m);
    const std::size_t n = m.n_atoms();
    if (n > kMaxAtoms || static_cast<double>(m.photon_cutoff + 1) * std::ldexp(1.0, static_cast<int>(n)) >
                             static_cast<double>(kMaxFullDimension)) {
        std::ostringstream os;
        os << "full Hamiltonian too large: n=" << n << ", photon_cutoff=" << m.photon_cutoff
           << " (limits: n <= " << kMaxAtoms << ", dimension <= " << kMaxFullDimension << ")";
        throw std::invalid_argument(os.str());
    }
    const Eigen::Index dim = full_dimension(m);
    const Eigen::Index atomic_dim = Eigen::Index{1} << n;
    ComplexMatrixXd h = ComplexMatrixXd::Zero(dim, dim);

    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const BasisLabel label = basis_label(idx, n);
        double energy = m.omega_c * label.photon_number;
        for (std::size_t i = 0; i < n; ++i) {
            if (label.atom_excited(i, n)) {
                energy += m.atoms[i].omega;
            }
        }
        h(idx, idx) = energy;
    }

    // Off-diagonal couplings, filled from the "upper" state of each pair so
    // the matrix comes out exactly symmetric.
    for (int photons = 0; photons <= m.photon_cutoff; ++photons) {
        for (Eigen::Index bits = 0; bits < atomic_dim; ++bits) {
            const Eigen::Index from = photons * atomic_dim + bits;
            for (std::size_t i = 0; i < n; ++i) {
                const double g = m.atoms[i].g;
                if (g == 0.0) {
                    continue;
                }
                const std::uint32_t mask = atom_mask(i, n);
                const bool excited = (static_cast<std::uint32_t>(bits) & mask) != 0;
                if (excited || photons == m.photon_cutoff) {
                    continue;
                }
                const Eigen::Index raised_bits = bits | mask;
                const double amp = g * std::sqrt(static_cast<double>(photons + 1));
                // a^dag sigma^- : |n+1, atom down> <-> |n, atom up>
                const Eigen::Index up_atom = photons * atomic_dim + raised_bits;
                const Eigen::Index up_photon = (photons + 1) * atomic_dim + bits;
                h(up_photon, up_atom) += amp;
                h(up_atom, up_photon) += amp;
                if (!m.rwa) {
                    // a^dag sigma^+ : |n, atom down> <-> |n+1, atom up>
                    const Eigen::Index both_up = (photons + 1) * atomic_dim + raised_bits;
                    h(both_up, from) += amp;
                    h(from, both_up) += amp;
                }
            }
        }
    }
    return h;
}

std::vector<Eigen::Index> single_excitation_indices(std::size_t n_atoms) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < n_atoms; ++i) {
        idx.push_back(basis_index({0, atom_mask(i, n_atoms)}, n_atoms));
    }
    idx.push_back(basis_index({1, 0}, n_atoms));
    return idx;
}

ComplexMatrixXd single_excitation_block(const CavityModel& m) {
    validate(m);
    if (!m.rwa) {
        throw std::invalid_argument("block structure invalid without RWA");
    }
    const auto n = static_cast<Eigen::Index>(m.n_atoms());
    ComplexMatrixXd h = ComplexMatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = m.atoms[i].omega;
        h(i, n) = m.atoms[i].g;
        h(n, i) = m.atoms[i].g;
    }
    h(n, n) = m.omega_c;
    return h;
}

ComplexMatrixXd extract_block(const ComplexMatrixXd& m, const std::vector<Eigen::Index>& indices) {
    const auto k = static_cast<Eigen::Index>(indices.size());
    ComplexMatrixXd out(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            out(r, c) = m(indices[r], indices[c]);
        }
    }
    return out;
}

CavityModel apply_zs_shift(const CavityModel& m, std::size_t atom_index, double ds, double dg) {
    if (atom_index >= m.n_atoms()) {
        throw std::out_of_range("apply_zs_shift: atom index " + std::to_string(atom_index) + " out of range");
    }
    CavityModel shifted = m;
    auto& atom = shifted.atoms[atom_index];
    if (atom.g + dg < 0.0) {
        throw std::invalid_argument("apply_zs_shift: shifted coupling would be negative");
    }
    atom.omega += ds;
    atom.g += dg;
    return shifted;
}

ComplexMatrixXd excitation_number_operator(const CavityModel& m) {
    const std::size_t n = m.n_atoms();
    const Eigen::Index dim = full_dimension(m);
    ComplexMatrixXd num = ComplexMatrixXd::Zero(dim, dim);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const BasisLabel label = basis_label(idx, n);
        num(idx, idx) = static_cast<double>(label.photon_number + std::popcount(label.atomic_bits));
    }
    return num;
}

ComplexMatrixXd collective_lowering(const std::vector<double>& couplings) {
    const std::size_t n = couplings.size();
    const Eigen::Index dim = Eigen::Index{1} << n;
    ComplexMatrixXd op = ComplexMatrixXd::Zero(dim, dim);
    for (Eigen::Index bits = 0; bits < dim; ++bits) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t mask = atom_mask(i, n);
            if (static_cast<std::uint32_t>(bits) & mask) {
                op(bits & ~static_cast<Eigen::Index>(mask), bits) += couplings[i];
            }
        }
    }
    return op;
}

ComplexMatrixXd collective_raising(const std::vector<double>& couplings) {
    return collective_lowering(couplings).adjoint();
}

std::vector<double> couplings_of(const CavityModel& m) {
    std::vector<double> g;
    g.reserve(m.atoms.size());
    for (const auto& a : m.atoms) {
        g.push_back(a.g);
    }
    return g;
}

double cavity_length(double omega_c) {
    return std::numbers::pi * si::c / omega_c;
}

double coupling_from_position(double x, double length, double omega_c, double dipole_moment, double volume) {
    require(std::isfinite(x) && x >= 0.0 && x <= length, "coupling_from_position: position outside [0, L]");
    require(omega_c > 0.0 && volume > 0.0, "coupling_from_position: omega_c and volume must be positive");
    const double field_amplitude = std::sqrt(si::hbar * omega_c / (2.0 * si::epsilon0 * volume));
    return std::abs(dipole_moment) * field_amplitude * std::sin(omega_c * x / si::c) / si::hbar;
}

}  // namespace darkcav
