#pragma once

// Dense complex linear algebra for small Hermitian problems.
//
// Everything here is templated on the real scalar type and works on plain
// Eigen dense types, so callers can mix these helpers with ordinary Eigen
// expressions. All Hamiltonians are stored divided by hbar, i.e. in units of
// angular frequency.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace darkcav {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using StateVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrixXd = ComplexMatrix<double>;
using StateVectorXd = StateVector<double>;
using RealVectorXd = RealVector<double>;

/// Thrown by herm_eig when the input is not Hermitian within tolerance.
class NotHermitianError : public std::invalid_argument {
public:
    NotHermitianError(double residual, double scale)
        : std::invalid_argument(message(residual, scale)), residual_(residual), scale_(scale) {}

    double residual() const noexcept { return residual_; }
    double scale() const noexcept { return scale_; }

private:
    static std::string message(double residual, double scale) {
        std::ostringstream os;
        os << "matrix is not Hermitian: max|M - M^H| = " << residual << " (max|M| = " << scale << ")";
        return os.str();
    }

    double residual_;
    double scale_;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown by cubic_roots when the cubic has a complex-conjugate pair.
class ComplexRootsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Eigenpairs of a Hermitian matrix. Eigenvalues ascend; eigenvectors are the
/// matching columns, orthonormal, each with its largest component real positive.
template <typename Real>
struct Spectrum {
    RealVector<Real> eigenvalues;
    ComplexMatrix<Real> eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
    StateVector<Real> vector(Eigen::Index k) const { return eigenvectors.col(k); }
};

using SpectrumXd = Spectrum<double>;

template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
auto hermiticity_residual(const Eigen::MatrixBase<Derived>& m) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (m.rows() != m.cols()) {
        throw DimensionError("hermiticity_residual: matrix is not square");
    }
    return m.size() == 0 ? Real(0) : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-12) {
    return m.rows() == m.cols() && hermiticity_residual(m) <= rel_tol * max_abs(m);
}

/// Rotates v by a global phase so its largest-magnitude component is real
/// and positive. Ties go to the lowest index.
template <typename Real>
void fix_phase(Eigen::Ref<StateVector<Real>> v) {
    if (v.size() == 0) {
        return;
    }
    const Real largest = v.cwiseAbs().maxCoeff();
    if (largest == Real(0)) {
        return;
    }
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= largest * (Real(1) - Real(1e-12))) {
            pivot = i;
            break;
        }
    }
    const Complex<Real> phase = std::conj(v[pivot]) / std::abs(v[pivot]);
    v *= phase;
    v[pivot] = Complex<Real>(v[pivot].real(), Real(0));
}

template <typename Real>
StateVector<Real> phase_fixed(StateVector<Real> v) {
    fix_phase<Real>(v);
    return v;
}

template <typename Real>
StateVector<Real> normalized(const StateVector<Real>& v) {
    const Real n = v.norm();
    if (n == Real(0)) {
        throw std::invalid_argument("cannot normalize the zero vector");
    }
    return v / n;
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Rejects inputs whose anti-Hermitian part exceeds rel_tol * max|M|.
/// Eigenvectors inside a degenerate cluster are orthonormal but otherwise
/// arbitrary; compare them through subspace projectors.
template <typename Real>
Spectrum<Real> herm_eig(const ComplexMatrix<Real>& m, Real rel_tol = Real(1e-12)) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw DimensionError("herm_eig: expected a non-empty square matrix");
    }
    const Real scale = max_abs(m);
    const Real residual = hermiticity_residual(m);
    if (residual > rel_tol * scale) {
        throw NotHermitianError(static_cast<double>(residual), static_cast<double>(scale));
    }
    // Symmetrize so the solver sees the same matrix whichever triangle it reads.
    const ComplexMatrix<Real> h = (m + m.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(h, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("herm_eig: eigensolver did not converge");
    }
    Spectrum<Real> out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index k = 0; k < out.dim(); ++k) {
        fix_phase<Real>(out.eigenvectors.col(k));
    }
    return out;
}

/// exp(-i H t) psi through the spectral decomposition of H.
template <typename Real>
StateVector<Real> evolve(const Spectrum<Real>& spec, const StateVector<Real>& psi0, Real t) {
    if (psi0.size() != spec.dim()) {
        throw DimensionError("evolve: state dimension does not match the spectrum");
    }
    if (t == Real(0)) {
        return psi0;
    }
    StateVector<Real> coeffs = spec.eigenvectors.adjoint() * psi0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        coeffs[k] *= std::polar(Real(1), -spec.eigenvalues[k] * t);
    }
    return spec.eigenvectors * coeffs;
}

/// Sum_k lambda_k |v_k><v_k|.
template <typename Real>
ComplexMatrix<Real> reconstruct(const Spectrum<Real>& spec) {
    return spec.eigenvectors * spec.eigenvalues.template cast<Complex<Real>>().asDiagonal() *
           spec.eigenvectors.adjoint();
}

/// Coefficients (A, B, C) of det(x I - M) = x^3 + A x^2 + B x + C for a 3x3 Hermitian M.
template <typename Real>
std::array<Real, 3> characteristic_coefficients(const ComplexMatrix<Real>& m) {
    if (m.rows() != 3 || m.cols() != 3) {
        throw DimensionError("characteristic_coefficients: expected a 3x3 matrix");
    }
    const Complex<Real> trace = m.trace();
    const Complex<Real> minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                                 m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const Complex<Real> det = m.determinant();
    return {-trace.real(), minors.real(), -det.real()};
}

/// Real roots of x^3 + A x^2 + B x + C, ascending.
///
/// Uses the trigonometric form of the depressed cubic followed by Newton
/// polishing on the original polynomial. Throws ComplexRootsError when the
/// discriminant shows a complex pair beyond rounding.
template <typename Real>
std::array<Real, 3> cubic_roots(Real a, Real b, Real c) {
    using std::abs;
    using std::sqrt;
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
        throw std::invalid_argument("cubic_roots: coefficients must be finite");
    }
    const auto poly = [&](Real x) { return ((x + a) * x + b) * x + c; };
    const auto dpoly = [&](Real x) { return (Real(3) * x + Real(2) * a) * x + b; };

    // x = y - a/3 gives y^3 + p y + q.
    const Real shift = a / Real(3);
    const Real p = b - a * shift;
    const Real q = Real(2) * shift * shift * shift - shift * b + c;

    // 4p^3 + 27q^2 > 0 means one real root and a complex pair.
    const Real lhs = Real(4) * p * p * p + Real(27) * q * q;
    const Real mag = Real(4) * abs(p * p * p) + Real(27) * q * q;
    const Real coeff_scale = std::max({Real(1), abs(a), abs(b), abs(c)});
    const Real eps = std::numeric_limits<Real>::epsilon();
    if (lhs > Real(1e-8) * mag + Real(64) * eps * eps * coeff_scale * coeff_scale) {
        std::ostringstream os;
        os << "cubic_roots: complex roots (4p^3 + 27q^2 = " << lhs << ")";
        throw ComplexRootsError(os.str());
    }

    std::array<Real, 3> roots{};
    if (p >= Real(0)) {
        // Only reachable with p ~ 0 and q ~ 0: a triple root.
        const Real y = std::cbrt(-q);
        roots = {y - shift, y - shift, y - shift};
    } else {
        const Real r = sqrt(-p / Real(3));
        Real arg = Real(3) * q / (Real(2) * p) / r;
        arg = std::clamp(arg, Real(-1), Real(1));
        const Real phi = std::acos(arg) / Real(3);
        const Real two_pi_3 = Real(2) * std::numbers::pi_v<Real> / Real(3);
        for (int k = 0; k < 3; ++k) {
            roots[k] = Real(2) * r * std::cos(phi - two_pi_3 * Real(k)) - shift;
        }
    }

    for (Real& x : roots) {
        for (int iter = 0; iter < 3; ++iter) {
            const Real fx = poly(x);
            const Real dfx = dpoly(x);
            if (fx == Real(0) || dfx == Real(0)) {
                break;
            }
            const Real candidate = x - fx / dfx;
            if (!(abs(poly(candidate)) < abs(fx))) {
                break;
            }
            x = candidate;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Orthonormal basis of {v : |M v| <= tol * max|M| * |v|}. M may be rectangular.
template <typename Real>
std::vector<StateVector<Real>> null_space(const ComplexMatrix<Real>& m, Real tol) {
    if (!(tol > Real(0))) {
        throw std::invalid_argument("null_space: tol must be positive");
    }
    std::vector<StateVector<Real>> basis;
    if (m.cols() == 0) {
        return basis;
    }
    const Real threshold = tol * max_abs(m);
    if (m.rows() == 0) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            basis.push_back(StateVector<Real>::Unit(m.cols(), j));
        }
        return basis;
    }
    Eigen::JacobiSVD<ComplexMatrix<Real>> svd(m, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > threshold) {
            ++rank;
        }
    }
    for (Eigen::Index j = rank; j < m.cols(); ++j) {
        StateVector<Real> v = svd.matrixV().col(j);
        fix_phase<Real>(v);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Spectral-norm distance between the projectors onto span(U) and span(V).
/// Columns of U and V must be orthonormal.
template <typename Real>
Real subspace_distance(const ComplexMatrix<Real>& u, const ComplexMatrix<Real>& v) {
    if (u.rows() != v.rows()) {
        throw DimensionError("subspace_distance: ambient dimensions differ");
    }
    const ComplexMatrix<Real> diff = u * u.adjoint() - v * v.adjoint();
    if (diff.size() == 0) {
        return Real(0);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(diff, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Real>
Real subspace_distance(const StateVector<Real>& u, const StateVector<Real>& v) {
    return subspace_distance<Real>(ComplexMatrix<Real>(u), ComplexMatrix<Real>(v));
}

/// Half-open index ranges of eigenvalues whose consecutive gaps are below
/// rel_gap * scale. Input must be sorted ascending.
template <typename Real>
std::vector<std::pair<Eigen::Index, Eigen::Index>> degenerate_clusters(const RealVector<Real>& sorted,
                                                                       Real rel_gap, Real scale) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
    Eigen::Index begin = 0;
    for (Eigen::Index i = 1; i <= sorted.size(); ++i) {
        if (i == sorted.size() || sorted[i] - sorted[i - 1] >= rel_gap * scale) {
            clusters.emplace_back(begin, i);
            begin = i;
        }
    }
    return clusters;
}

}  // namespace darkcav
