#include "darkcav/darkstates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace darkcav {

namespace {

StateVectorXd vec3(double a, double b, double c) {
    StateVectorXd v(3);
    v << a, b, c;
    return v;
}

double max_coupling(const CavityModel& m) {
    double g = 0.0;
    for (const auto& a : m.atoms) {
        g = std::max(g, a.g);
    }
    return g;
}

}  // namespace

const char* to_string(Branch b) {
    switch (b) {
        case Branch::degenerate:
            return "degenerate";
        case Branch::shifted:
            return "shifted";
        case Branch::shifted_numeric_fallback:
            return "shifted_numeric_fallback";
    }
    return "unknown";
}

const char* to_string(Subspace s) {
    return s == Subspace::full ? "full" : "single_excitation";
}

ComplexMatrixXd three_level_block(double omega_c, double omega_a1, double omega_a2, double g1, double g2) {
    ComplexMatrixXd h(3, 3);
    h << omega_a1, 0.0, g1,
         0.0, omega_a2, g2,
         g1, g2, omega_c;
    return h;
}

StateVectorXd dark_state_degenerate(double g1, double g2) {
    if (g1 == 0.0 && g2 == 0.0) {
        throw std::invalid_argument("dark_state_degenerate: both couplings are zero, every atomic state is dark");
    }
    StateVectorXd v(2);
    v << -g2, g1;
    return v / std::hypot(g1, g2);
}

StateVectorXd dark_state_block(double g1, double g2) {
    const StateVectorXd atomic = dark_state_degenerate(g1, g2);
    StateVectorXd v = StateVectorXd::Zero(3);
    v.head(2) = atomic;
    return v;
}

AnalyticSpectrum analytic_spectrum_degenerate(double omega_c, double omega_a, double g1, double g2) {
    AnalyticSpectrum out;
    out.branch = Branch::degenerate;
    const double coupling_sq = g1 * g1 + g2 * g2;

    if (coupling_sq == 0.0) {
        // Decoupled: atoms at omega_a (twice), photon at omega_c.
        std::array<std::pair<double, StateVectorXd>, 3> pairs{{{omega_a, vec3(1, 0, 0)},
                                                                {omega_a, vec3(0, 1, 0)},
                                                                {omega_c, vec3(0, 0, 1)}}};
        std::stable_sort(pairs.begin(), pairs.end(),
                         [](const auto& l, const auto& r) { return l.first < r.first; });
        for (std::size_t k = 0; k < 3; ++k) {
            out.eigenvalues[k] = pairs[k].first;
            out.eigenvectors[k] = pairs[k].second;
            out.raw_vectors[k] = pairs[k].second;
        }
        return out;
    }

    const double detuning = omega_c - omega_a;
    const double s = std::sqrt(4.0 * coupling_sq + detuning * detuning);
    // S - d and S + d; the smaller one is rewritten as 4G^2 / (S + |d|) to avoid cancellation.
    const double s_minus_d = detuning > 0.0 ? 4.0 * coupling_sq / (s + detuning) : s - detuning;
    const double s_plus_d = detuning < 0.0 ? 4.0 * coupling_sq / (s - detuning) : s + detuning;

    // Ascending order: lower bright, dark (at omega_a), upper bright.
    out.eigenvalues = {0.5 * (omega_c + omega_a - s), omega_a, 0.5 * (omega_c + omega_a + s)};
    out.raw_vectors[0] = vec3(-2.0 * g1 / s_minus_d, -2.0 * g2 / s_minus_d, 1.0);
    out.raw_vectors[1] = vec3(-g2, g1, 0.0);
    out.raw_vectors[2] = vec3(2.0 * g1 / s_plus_d, 2.0 * g2 / s_plus_d, 1.0);
    for (std::size_t k = 0; k < 3; ++k) {
        out.eigenvectors[k] = phase_fixed<double>(normalized<double>(out.raw_vectors[k]));
    }
    out.dark_index = 1;
    return out;
}

std::array<double, 3> shifted_cubic_coefficients(double omega_c, double omega_a1, double omega_a2, double g1,
                                                 double g2) {
    const double a = -(omega_c + omega_a1 + omega_a2);
    const double b = omega_c * omega_a1 + omega_c * omega_a2 + omega_a1 * omega_a2 - g1 * g1 - g2 * g2;
    const double c = g1 * g1 * omega_a2 + g2 * g2 * omega_a1 - omega_c * omega_a1 * omega_a2;
    return {a, b, c};
}

StateVectorXd shifted_eigenvector_raw(double omega_c, double omega_a2, double g1, double g2, double alpha) {
    const double x2 = g2 / (alpha - omega_a2);
    const double x1 = -(omega_c - alpha) / g1 + g2 * g2 / (g1 * (omega_a2 - alpha));
    return vec3(x1, x2, 1.0);
}

AnalyticSpectrum analytic_spectrum_shifted(double omega_c, double omega_a1, double omega_a2, double g1, double g2) {
    const double window = kDegenerateTolerance * omega_c;
    if (std::abs(omega_a1 - omega_a2) <= window) {
        throw std::invalid_argument(
            "analytic_spectrum_shifted: equal atomic frequencies, use analytic_spectrum_degenerate");
    }
    AnalyticSpectrum out;
    out.branch = Branch::shifted;
    const auto [a, b, c] = shifted_cubic_coefficients(omega_c, omega_a1, omega_a2, g1, g2);
    out.eigenvalues = cubic_roots(a, b, c);
    // The monomial form loses digits when the roots crowd around omega_c.
    // Polish against the same polynomial written as det(x - H1).
    const auto det = [&](double x) {
        return (x - omega_a1) * (x - omega_a2) * (x - omega_c) - g1 * g1 * (x - omega_a2) -
               g2 * g2 * (x - omega_a1);
    };
    const auto ddet = [&](double x) {
        return (x - omega_a2) * (x - omega_c) + (x - omega_a1) * (x - omega_c) + (x - omega_a1) * (x - omega_a2) -
               g1 * g1 - g2 * g2;
    };
    for (double& x : out.eigenvalues) {
        for (int iter = 0; iter < 4; ++iter) {
            const double f = det(x);
            const double df = ddet(x);
            if (f == 0.0 || df == 0.0) {
                break;
            }
            const double next = x - f / df;
            if (!(std::abs(det(next)) < std::abs(f))) {
                break;
            }
            x = next;
        }
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());

    std::optional<SpectrumXd> numeric;
    for (std::size_t k = 0; k < 3; ++k) {
        const double alpha = out.eigenvalues[k];
        const bool singular = std::abs(g1) <= window || std::abs(alpha - omega_a2) <= window;
        if (!singular) {
            out.raw_vectors[k] = shifted_eigenvector_raw(omega_c, omega_a2, g1, g2, alpha);
            out.eigenvectors[k] = phase_fixed<double>(normalized<double>(out.raw_vectors[k]));
            continue;
        }
        if (!numeric) {
            numeric = herm_eig<double>(three_level_block(omega_c, omega_a1, omega_a2, g1, g2));
        }
        out.eigenvectors[k] = numeric->vector(static_cast<Eigen::Index>(k));
        out.numeric_fallback[k] = true;
        out.branch = Branch::shifted_numeric_fallback;
    }
    return out;
}

AnalyticSpectrum analytic_spectrum(double omega_c, double omega_a1, double omega_a2, double g1, double g2) {
    if (std::abs(omega_a1 - omega_a2) <= kDegenerateTolerance * omega_c) {
        return analytic_spectrum_degenerate(omega_c, 0.5 * (omega_a1 + omega_a2), g1, g2);
    }
    return analytic_spectrum_shifted(omega_c, omega_a1, omega_a2, g1, g2);
}

StateVectorXd singlet_ensemble(std::size_t n, const std::vector<double>& couplings) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("singlet_ensemble: atom count must be even and >= 2, got " + std::to_string(n));
    }
    if (!couplings.empty() && couplings.size() != n) {
        throw std::invalid_argument("singlet_ensemble: expected one coupling per atom");
    }
    if (n > kMaxAtoms) {
        throw std::invalid_argument("singlet_ensemble: too many atoms");
    }
    // Pair states over the two-atom basis |00>, |01>, |10>, |11>.
    StateVectorXd state = StateVectorXd::Ones(1);
    for (std::size_t j = 0; j < n / 2; ++j) {
        StateVectorXd pair = StateVectorXd::Zero(4);
        if (couplings.empty()) {
            pair[1] = 1.0;
            pair[2] = -1.0;
        } else {
            const StateVectorXd d = dark_state_degenerate(couplings[2 * j], couplings[2 * j + 1]);
            pair[2] = d[0];  // |10>
            pair[1] = d[1];  // |01>
        }
        // Atom 1 is the most significant bit, so earlier pairs are the outer factor.
        StateVectorXd next(state.size() * 4);
        for (Eigen::Index outer = 0; outer < state.size(); ++outer) {
            next.segment(outer * 4, 4) = state[outer] * pair;
        }
        state = std::move(next);
    }
    return normalized<double>(state);
}

StateVectorXd embed_single_excitation(const StateVectorXd& amplitudes) {
    const auto n = static_cast<std::size_t>(amplitudes.size());
    if (n == 0 || n > kMaxAtoms) {
        throw DimensionError("embed_single_excitation: bad atom count");
    }
    StateVectorXd out = StateVectorXd::Zero(Eigen::Index{1} << n);
    for (std::size_t i = 0; i < n; ++i) {
        out[Eigen::Index{1} << (n - 1 - i)] = amplitudes[static_cast<Eigen::Index>(i)];
    }
    return out;
}

DarknessReport is_dark(const CavityModel& m, const StateVectorXd& psi, Subspace subspace, double tol) {
    const std::size_t n = m.n_atoms();
    const std::vector<double> g = couplings_of(m);
    const double g_scale = max_coupling(m);
    DarknessReport r;
    r.subspace = subspace;

    StateVectorXd atomic;
    if (subspace == Subspace::single_excitation) {
        if (psi.size() != static_cast<Eigen::Index>(n + 1)) {
            throw DimensionError("is_dark: single-excitation state must have n+1 components");
        }
        atomic = embed_single_excitation(psi.head(static_cast<Eigen::Index>(n)));
        r.photon_support = std::norm(psi[static_cast<Eigen::Index>(n)]);
    } else {
        const Eigen::Index atomic_dim = Eigen::Index{1} << n;
        if (psi.size() == atomic_dim) {
            atomic = psi;
        } else if (psi.size() == full_dimension(m)) {
            atomic = psi.head(atomic_dim);
            r.photon_support = psi.tail(psi.size() - atomic_dim).squaredNorm();
        } else {
            throw DimensionError("is_dark: full-subspace state must be atomic (2^n) or full ((n_max+1) 2^n)");
        }
    }

    r.emit_residual = (collective_lowering(g) * atomic).norm();
    r.absorb_residual = (collective_raising(g) * atomic).norm();
    r.atomic_excitation = atomic.squaredNorm() - std::norm(atomic[0]);

    const double residual_tol = tol * g_scale;
    bool dark = r.emit_residual <= residual_tol && r.photon_support <= tol && r.atomic_excitation > tol;
    if (subspace == Subspace::full) {
        dark = dark && r.absorb_residual <= residual_tol;
    }
    r.is_dark = dark;
    return r;
}

std::vector<DarkState> find_dark_states(const CavityModel& m, Subspace subspace, double tol) {
    const std::size_t n = m.n_atoms();
    const std::vector<double> g = couplings_of(m);
    const double g_scale = max_coupling(m) > 0.0 ? max_coupling(m) : 1.0;

    ComplexMatrixXd h;
    ComplexMatrixXd constraints;
    if (subspace == Subspace::single_excitation) {
        h = single_excitation_block(m);
        const auto dim = static_cast<Eigen::Index>(n + 1);
        constraints = ComplexMatrixXd::Zero(2, dim);
        constraints(0, dim - 1) = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            constraints(1, static_cast<Eigen::Index>(i)) = g[i] / g_scale;
        }
    } else {
        h = build_full_hamiltonian(m);
        const Eigen::Index dim = h.rows();
        const Eigen::Index atomic_dim = Eigen::Index{1} << n;
        const Eigen::Index photon_rows = dim - atomic_dim;
        constraints = ComplexMatrixXd::Zero(photon_rows + 2 * atomic_dim, dim);
        for (Eigen::Index r = 0; r < photon_rows; ++r) {
            constraints(r, atomic_dim + r) = 1.0;
        }
        constraints.block(photon_rows, 0, atomic_dim, atomic_dim) = collective_lowering(g) / g_scale;
        constraints.block(photon_rows + atomic_dim, 0, atomic_dim, atomic_dim) = collective_raising(g) / g_scale;
    }

    const SpectrumXd spec = herm_eig<double>(h);
    std::vector<DarkState> found;
    for (const auto& [begin, end] :
         degenerate_clusters<double>(spec.eigenvalues, 1e-9, std::max(max_abs(h), 1.0))) {
        const ComplexMatrixXd cluster = spec.eigenvectors.middleCols(begin, end - begin);
        const ComplexMatrixXd coupled = constraints * cluster;
        Eigen::JacobiSVD<ComplexMatrixXd> svd(coupled, Eigen::ComputeFullV);
        // Least-coupled combinations come last in the SVD ordering.
        for (Eigen::Index j = cluster.cols() - 1; j >= 0; --j) {
            StateVectorXd candidate = cluster * svd.matrixV().col(j);
            fix_phase<double>(candidate);
            DarknessReport report = is_dark(m, candidate, subspace, tol);
            if (!report.is_dark) {
                continue;
            }
            const double energy = (candidate.adjoint() * h * candidate)(0, 0).real();
            found.push_back({std::move(candidate), energy, report});
        }
    }
    return found;
}

}  // namespace darkcav
