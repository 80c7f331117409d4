#include <cmath>
#include <stdexcept>

#include "darkcav/model.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace darkcav;
using darkcav::testing::Gen;

namespace {

CavityModel two_atoms(double g1 = 0.01, double g2 = 0.005) {
    CavityModel m;
    m.omega_c = 1.0;
    m.atoms = {{1.0, g1, {}}, {1.0, g2, {}}};
    return m;
}

CavityModel random_model(Gen& gen, std::size_t n, int cutoff, bool rwa) {
    CavityModel m;
    m.omega_c = 1.0;
    m.photon_cutoff = cutoff;
    m.rwa = rwa;
    for (std::size_t i = 0; i < n; ++i) {
        m.atoms.push_back({gen.uniform(0.9, 1.1), gen.uniform(0.0, 0.05), {}});
    }
    return m;
}

}  // namespace

TEST_CASE("basis ordering is photon-major with atom 1 as the leading bit") {
    CHECK(basis_index({0, 0b10}, 2) == 2);
    CHECK(basis_index({1, 0b00}, 2) == 4);
    CHECK(basis_label(5, 2) == BasisLabel{1, 0b01});
    CHECK(to_string(BasisLabel{1, 0b00}, 2) == "|1>_p|00>_a");
    CHECK(to_string(BasisLabel{0, 0b10}, 2) == "|0>_p|10>_a");
    CHECK(BasisLabel{0, 0b10}.atom_excited(0, 2));
    CHECK_FALSE(BasisLabel{0, 0b10}.atom_excited(1, 2));
    for (Eigen::Index i = 0; i < 32; ++i) {
        CHECK(basis_index(basis_label(i, 3), 3) == i);
    }
    CHECK(single_excitation_indices(2) == std::vector<Eigen::Index>{2, 1, 4});
}

TEST_CASE("two-atom single-excitation block") {
    const ComplexMatrixXd h = single_excitation_block(two_atoms());
    ComplexMatrixXd expected(3, 3);
    expected << 1.0, 0.0, 0.01,
                0.0, 1.0, 0.005,
                0.01, 0.005, 1.0;
    CHECK(max_abs(ComplexMatrixXd(h - expected)) == 0.0);
}

TEST_CASE("full Hamiltonian entries for one atom") {
    CavityModel m;
    m.omega_c = 1.0;
    m.atoms = {{0.9, 0.1, {}}};
    m.photon_cutoff = 2;
    const ComplexMatrixXd h = build_full_hamiltonian(m);
    REQUIRE(h.rows() == 6);
    // |n>|e> couples to |n+1>|g> with g sqrt(n+1).
    CHECK(h(basis_index({0, 1}, 1), basis_index({1, 0}, 1)).real() == doctest::Approx(0.1));
    CHECK(h(basis_index({1, 1}, 1), basis_index({2, 0}, 1)).real() == doctest::Approx(0.1 * std::sqrt(2.0)));
    CHECK(h(basis_index({2, 1}, 1), basis_index({2, 1}, 1)).real() == doctest::Approx(2.9));
    CHECK(h(basis_index({0, 0}, 1), basis_index({1, 1}, 1)) == std::complex<double>(0.0));

    m.rwa = false;
    const ComplexMatrixXd full = build_full_hamiltonian(m);
    CHECK(full(basis_index({0, 0}, 1), basis_index({1, 1}, 1)).real() == doctest::Approx(0.1));
    CHECK(full(basis_index({1, 0}, 1), basis_index({2, 1}, 1)).real() == doctest::Approx(0.1 * std::sqrt(2.0)));
}

TEST_CASE("full Hamiltonian is Hermitian and, under RWA, conserves excitations") {
    Gen gen(41);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<std::size_t>(gen.integer(1, 5));
        const int cutoff = gen.integer(1, 3);
        const CavityModel m = random_model(gen, n, cutoff, true);
        const ComplexMatrixXd h = build_full_hamiltonian(m);
        CHECK(hermiticity_residual(h) == 0.0);
        const ComplexMatrixXd number = excitation_number_operator(m);
        CHECK(max_abs(ComplexMatrixXd(h * number - number * h)) <= 1e-12 * max_abs(h));

        const ComplexMatrixXd block = single_excitation_block(m);
        CHECK(max_abs(ComplexMatrixXd(block - extract_block(h, single_excitation_indices(n)))) == 0.0);
    }
}

TEST_CASE("counter-rotating terms break excitation conservation") {
    Gen gen(43);
    const CavityModel m = random_model(gen, 2, 2, false);
    const ComplexMatrixXd h = build_full_hamiltonian(m);
    const ComplexMatrixXd number = excitation_number_operator(m);
    CHECK(max_abs(ComplexMatrixXd(h * number - number * h)) > 1e-3);
    CHECK_THROWS_WITH_AS(single_excitation_block(m), doctest::Contains("RWA"), std::invalid_argument);
}

TEST_CASE("validation") {
    CavityModel m = two_atoms();
    CHECK_NOTHROW(validate(m));
    m.omega_c = 0.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = two_atoms();
    m.atoms[1].g = -0.1;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = two_atoms();
    m.atoms.clear();
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = two_atoms();
    m.photon_cutoff = 0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = two_atoms();
    m.atoms.resize(kMaxAtoms + 1, AtomParams{1.0, 0.01, {}});
    CHECK_NOTHROW(validate(m));
    CHECK_THROWS_AS(build_full_hamiltonian(m), std::invalid_argument);
    m.atoms.resize(10);
    m.photon_cutoff = 64;
    CHECK_THROWS_AS(build_full_hamiltonian(m), std::invalid_argument);
    m = two_atoms();
    m.atoms[0].omega = std::nan("");
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
}

TEST_CASE("diagnostics") {
    CavityModel m = two_atoms();
    m.atoms[0].omega = 0.98;
    const ModelDiagnostics d = diagnostics(m);
    CHECK(d.detunings[0] == doctest::Approx(0.02));
    CHECK(d.max_relative_detuning == doctest::Approx(0.02));
    CHECK(d.max_coupling_ratio == doctest::Approx(0.01));
}

TEST_CASE("ZS shift") {
    const CavityModel m = two_atoms();
    const CavityModel shifted = apply_zs_shift(m, 0, 0.01, 0.007);
    CHECK(shifted.atoms[0].omega == doctest::Approx(1.01));
    CHECK(shifted.atoms[0].g == doctest::Approx(0.017));
    CHECK(shifted.atoms[1].omega == 1.0);
    CHECK(m.atoms[0].omega == 1.0);
    CHECK_THROWS_AS(apply_zs_shift(m, 2, 0.0, 0.0), std::out_of_range);
    CHECK_THROWS_AS(apply_zs_shift(m, 0, 0.0, -0.02), std::invalid_argument);
}

TEST_CASE("collective operators") {
    const ComplexMatrixXd lower = collective_lowering({0.01, 0.005});
    const ComplexMatrixXd raise = collective_raising({0.01, 0.005});
    CHECK(max_abs(ComplexMatrixXd(raise - lower.adjoint())) == 0.0);
    // sigma_1^- |10> = |00>, sigma_2^- |01> = |00>
    CHECK(lower(0, 2).real() == doctest::Approx(0.01));
    CHECK(lower(0, 1).real() == doctest::Approx(0.005));
    // The singlet-like dark combination is annihilated.
    StateVectorXd dark = StateVectorXd::Zero(4);
    dark[2] = -0.005;
    dark[1] = 0.01;
    CHECK((lower * dark).norm() < 1e-18);
}

TEST_CASE("position-dependent coupling") {
    const double omega = 2.0e15;
    const double length = cavity_length(omega);
    CHECK(length == doctest::Approx(M_PI * si::c / omega));
    const double d = 2.0e-29, v = 1.0e-15;
    const double peak = d * std::sqrt(si::hbar * omega / (2 * si::epsilon0 * v)) / si::hbar;
    CHECK(coupling_from_position(length / 2, length, omega, d, v) == doctest::Approx(peak));
    CHECK(std::abs(coupling_from_position(0.0, length, omega, d, v)) < 1e-12 * peak);
    CHECK(coupling_from_position(length / 6, length, omega, d, v) == doctest::Approx(peak / 2));
    CHECK_THROWS_AS(coupling_from_position(-1e-9, length, omega, d, v), std::invalid_argument);
    CHECK_THROWS_AS(coupling_from_position(length * 1.01, length, omega, d, v), std::invalid_argument);
}

TEST_CASE("decoupled single atom is diagonal") {
    CavityModel m;
    m.omega_c = 1.0;
    m.atoms = {{0.8, 0.0, {}}};
    const ComplexMatrixXd h = build_full_hamiltonian(m);
    ComplexMatrixXd expected = ComplexMatrixXd::Zero(4, 4);
    expected.diagonal() << 0.0, 0.8, 1.0, 1.8;
    CHECK(max_abs(ComplexMatrixXd(h - expected)) == 0.0);
}
