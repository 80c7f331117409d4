#include "darkcav/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "darkcav/darkstates.hpp"
#include "darkcav/model.hpp"
#include "darkcav/numerics.hpp"
#include "darkcav/protocol.hpp"
#include "darkcav/random.hpp"

namespace darkcav {

namespace {

struct Context {
    const VerifyOptions& options;
    RandomSource rng;
};

ComplexMatrixXd random_hermitian(RandomSource& rng, Eigen::Index dim) {
    ComplexMatrixXd a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            a(i, j) = {rng.normal(), rng.normal()};
        }
    }
    return (a + a.adjoint()) / 2.0;
}

StateVectorXd random_state(RandomSource& rng, Eigen::Index dim) {
    StateVectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v[i] = {rng.normal(), rng.normal()};
    }
    return v.normalized();
}

CavityModel random_model(RandomSource& rng, bool rwa) {
    CavityModel m;
    m.omega_c = 1.0;
    m.rwa = rwa;
    m.photon_cutoff = 1 + static_cast<int>(rng.next_u64() % 3);
    const auto n = 1 + rng.next_u64() % 4;
    for (std::uint64_t i = 0; i < n; ++i) {
        m.atoms.push_back({1.0 + rng.uniform(-0.05, 0.05), rng.uniform(0.0, 0.05), {}});
    }
    return m;
}

ComplexMatrixXd maybe_corrupt(ComplexMatrixXd h, const Context& ctx) {
    if (ctx.options.inject_non_hermitian && h.rows() > 1) {
        h(0, 1) += 1e-3 * std::max(max_abs(h), 1.0);
    }
    return h;
}

std::string fmt(const char* label, double value) {
    std::ostringstream os;
    os << label << "=" << value;
    return os.str();
}

CheckResult check_hermiticity(Context& ctx) {
    double worst = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        const CavityModel m = random_model(ctx.rng, k % 2 == 0);
        const ComplexMatrixXd full = maybe_corrupt(build_full_hamiltonian(m), ctx);
        worst = std::max(worst, hermiticity_residual(full) / max_abs(full));
        if (m.rwa) {
            const ComplexMatrixXd block = maybe_corrupt(single_excitation_block(m), ctx);
            worst = std::max(worst, hermiticity_residual(block) / max_abs(block));
        }
    }
    return {"hermiticity", worst <= 1e-14, fmt("max relative |H - H^dag|", worst)};
}

CheckResult check_excitation_conservation(Context& ctx) {
    double worst = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        const CavityModel m = random_model(ctx.rng, true);
        const ComplexMatrixXd h = build_full_hamiltonian(m);
        const ComplexMatrixXd num = excitation_number_operator(m);
        worst = std::max(worst, max_abs(ComplexMatrixXd(h * num - num * h)));
    }
    return {"excitation_conservation", worst <= 1e-12, fmt("max |[H, N]|", worst)};
}

CheckResult check_analytic_numeric(Context& ctx) {
    double worst_value = 0.0;
    double worst_vector = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        const double w1 = 1.0 - ctx.rng.uniform(-0.05, 0.05);
        const double w2 = 1.0 - ctx.rng.uniform(-0.05, 0.05);
        const double g1 = ctx.rng.uniform(0.0, 0.05);
        const double g2 = ctx.rng.uniform(0.0, 0.05);
        for (const bool degenerate : {false, true}) {
            const double w2_used = degenerate ? w1 : w2;
            const AnalyticSpectrum a = analytic_spectrum(1.0, w1, w2_used, g1, g2);
            const SpectrumXd s = herm_eig<double>(three_level_block(1.0, w1, w2_used, g1, g2));
            for (Eigen::Index i = 0; i < 3; ++i) {
                worst_value = std::max(worst_value, std::abs(a.eigenvalues[static_cast<std::size_t>(i)] - s.eigenvalues[i]));
                worst_vector = std::max(worst_vector,
                                        subspace_distance<double>(a.eigenvectors[static_cast<std::size_t>(i)], s.vector(i)));
            }
        }
    }
    std::ostringstream detail;
    detail << "max eigenvalue error=" << worst_value << ", max subspace distance=" << worst_vector;
    return {"analytic_numeric", worst_value <= 1e-8 && worst_vector <= 1e-7, detail.str()};
}

CheckResult check_vieta(Context& ctx) {
    double worst = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        const double w1 = 1.0 - ctx.rng.uniform(-0.05, 0.05);
        const double w2 = 1.0 - ctx.rng.uniform(-0.05, 0.05);
        const auto [a, b, c] = shifted_cubic_coefficients(1.0, w1, w2, ctx.rng.uniform(0.0, 0.05),
                                                          ctx.rng.uniform(0.0, 0.05));
        const auto r = cubic_roots(a, b, c);
        const auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
        worst = std::max({worst, rel(r[0] + r[1] + r[2], -a), rel(r[0] * r[1] + r[0] * r[2] + r[1] * r[2], b),
                          rel(r[0] * r[1] * r[2], -c)});
    }
    return {"vieta", worst <= 1e-9, fmt("max relative error", worst)};
}

CheckResult check_unitarity(Context& ctx) {
    double worst = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        const Eigen::Index dim = 1 + static_cast<Eigen::Index>(ctx.rng.next_u64() % 16);
        const SpectrumXd s = herm_eig<double>(maybe_corrupt(random_hermitian(ctx.rng, dim), ctx));
        const StateVectorXd psi = random_state(ctx.rng, dim);
        for (double t : {0.1, 1.0, 10.0, 100.0}) {
            worst = std::max(worst, std::abs(evolve<double>(s, psi, t).norm() - 1.0));
        }
    }
    return {"unitarity", worst <= 1e-10, fmt("max |norm - 1|", worst)};
}

CheckResult check_group_law(Context& ctx) {
    double worst = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        const Eigen::Index dim = 1 + static_cast<Eigen::Index>(ctx.rng.next_u64() % 16);
        const SpectrumXd s = herm_eig<double>(random_hermitian(ctx.rng, dim));
        const StateVectorXd psi = random_state(ctx.rng, dim);
        const double t1 = ctx.rng.uniform(0.0, 10.0);
        const double t2 = ctx.rng.uniform(0.0, 10.0);
        const StateVectorXd twice = evolve<double>(s, evolve<double>(s, psi, t1), t2);
        worst = std::max(worst, (twice - evolve<double>(s, psi, t1 + t2)).norm());
    }
    return {"group_law", worst <= 1e-9, fmt("max |U(t2)U(t1)psi - U(t1+t2)psi|", worst)};
}

CheckResult check_reconstruction(Context& ctx) {
    double worst = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        const Eigen::Index dim = 1 + static_cast<Eigen::Index>(ctx.rng.next_u64() % 16);
        const ComplexMatrixXd h = random_hermitian(ctx.rng, dim);
        const SpectrumXd s = herm_eig<double>(h);
        worst = std::max(worst, max_abs(ComplexMatrixXd(reconstruct<double>(s) - h)) / max_abs(h));
    }
    return {"spectral_reconstruction", worst <= 1e-9, fmt("max relative entry error", worst)};
}

CheckResult check_darkness_invariance(Context& ctx) {
    int failures = 0;
    double worst_eigen_residual = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        const double wa = 1.0 - ctx.rng.uniform(-0.05, 0.05);
        const double g1 = ctx.rng.uniform(1e-3, 0.05);
        const double g2 = ctx.rng.uniform(1e-3, 0.05);
        CavityModel m;
        m.atoms = {{wa, g1, {}}, {wa, g2, {}}};
        const ComplexMatrixXd h = single_excitation_block(m);
        const StateVectorXd dark = dark_state_block(g1, g2);
        worst_eigen_residual = std::max(worst_eigen_residual, (h * dark - wa * dark).norm());
        const SpectrumXd s = herm_eig<double>(h);
        for (double t : {1.0, 10.0, 100.0}) {
            if (!is_dark(m, evolve<double>(s, dark, t), Subspace::single_excitation, 1e-9).is_dark) {
                ++failures;
            }
        }
    }
    std::ostringstream detail;
    detail << "non-dark after evolution=" << failures << ", max |H d - w_a d|=" << worst_eigen_residual;
    return {"darkness_invariance", failures == 0 && worst_eigen_residual <= 1e-12, detail.str()};
}

CheckResult check_null_protocol(Context& ctx) {
    double worst = 0.0;
    for (int k = 0; k < ctx.options.draws; ++k) {
        ZSJumpConfig cfg;
        cfg.omega_a = 1.0 - ctx.rng.uniform(-0.05, 0.05);
        cfg.g1 = ctx.rng.uniform(1e-3, 0.05);
        cfg.g2 = ctx.rng.uniform(1e-3, 0.05);
        const ZSJump jump(cfg);
        for (double t : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
            worst = std::max(worst, jump.yield(t));
        }
    }
    return {"null_protocol", worst <= 1e-12, fmt("max p_ds without shift", worst)};
}

const std::map<std::string, std::function<CheckResult(Context&)>>& registry() {
    static const std::map<std::string, std::function<CheckResult(Context&)>> checks{
        {"hermiticity", check_hermiticity},
        {"excitation_conservation", check_excitation_conservation},
        {"analytic_numeric", check_analytic_numeric},
        {"vieta", check_vieta},
        {"unitarity", check_unitarity},
        {"group_law", check_group_law},
        {"spectral_reconstruction", check_reconstruction},
        {"darkness_invariance", check_darkness_invariance},
        {"null_protocol", check_null_protocol},
    };
    return checks;
}

}  // namespace

std::vector<std::string> available_checks() {
    return {"hermiticity", "excitation_conservation", "analytic_numeric", "vieta", "unitarity",
            "group_law", "spectral_reconstruction", "darkness_invariance", "null_protocol"};
}

std::vector<CheckResult> run_checks(const std::vector<std::string>& names, const VerifyOptions& options) {
    if (names.empty()) {
        throw std::invalid_argument("no checks selected");
    }
    for (const auto& name : names) {
        if (!registry().contains(name)) {
            throw std::invalid_argument("unknown check '" + name + "'");
        }
    }
    std::vector<CheckResult> results;
    for (std::size_t i = 0; i < names.size(); ++i) {
        Context ctx{options, RandomSource(options.seed).derive(i)};
        try {
            results.push_back(registry().at(names[i])(ctx));
        } catch (const std::exception& e) {
            // A rejected (e.g. non-Hermitian) input is a failed check, not a crash.
            results.push_back({names[i], false, std::string("exception: ") + e.what()});
        }
    }
    return results;
}

}  // namespace darkcav
