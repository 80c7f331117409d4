#pragma once

// Test-only oracles and generators. Nothing here calls the eigensolver, so the
// oracles stay independent of the code paths they check.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "darkcav/numerics.hpp"

namespace darkcav::testing {

/// exp(-i H t) by scaling and squaring a 30-term Taylor series.
inline ComplexMatrixXd series_propagator(const ComplexMatrixXd& h, double t) {
    ComplexMatrixXd a = std::complex<double>(0.0, -t) * h;
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.5) {
        ++squarings;
    }
    a /= std::ldexp(1.0, squarings);
    const auto dim = h.rows();
    ComplexMatrixXd result = ComplexMatrixXd::Identity(dim, dim);
    ComplexMatrixXd term = ComplexMatrixXd::Identity(dim, dim);
    for (int k = 1; k <= 30; ++k) {
        term = term * a / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>()(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    ComplexMatrixXd hermitian(Eigen::Index dim) {
        ComplexMatrixXd a(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                a(i, j) = {normal(), normal()};
            }
        }
        return (a + a.adjoint()) / 2.0;
    }

    StateVectorXd state(Eigen::Index dim) {
        StateVectorXd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            v[i] = {normal(), normal()};
        }
        return v.normalized();
    }

private:
    std::mt19937_64 engine_;
};

inline double projector_distance(const StateVectorXd& a, const StateVectorXd& b) {
    // |P_a - P_b| for unit vectors is sqrt(1 - |<a|b>|^2).
    const double overlap = std::norm(a.normalized().dot(b.normalized()));
    return std::sqrt(std::max(0.0, 1.0 - overlap));
}

}  // namespace darkcav::testing
