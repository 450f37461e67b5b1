#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "oqb/errors.hpp"

namespace oqb {

using Complex = std::complex<double>;

// The models never exceed a 2x2 qubit pair, so matrices are dynamic-size with
// a compile-time cap of 4. All arithmetic on them is allocation free.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, 4, 1>;
using RealVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending so that
// index 0 is the candidate branch with eigenvalue closest to 1 for a state
// that starts pure.
struct EigenSystem {
    RealVector eigenvalues;
    std::vector<Vector> eigenvectors;
};

inline EigenSystem eig_hermitian(const Matrix& m) {
    if (m.rows() != m.cols())
        throw DimensionMismatch("eig_hermitian: matrix is not square");
    if (hermiticity_defect(m) > 1e-10)
        throw NonHermitianInput("eig_hermitian: input deviates from Hermitian by more than 1e-10");

    Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
    const auto n = m.rows();
    EigenSystem out;
    out.eigenvalues.resize(n);
    out.eigenvectors.reserve(static_cast<std::size_t>(n));
    // Eigen sorts ascending; reverse and fix the gauge so results are
    // deterministic: largest-modulus component made real positive.
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = n - 1 - k;
        out.eigenvalues[k] = solver.eigenvalues()[src];
        Vector v = solver.eigenvectors().col(src);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        const Complex phase = v[imax] / std::abs(v[imax]);
        v /= phase;
        out.eigenvectors.push_back(std::move(v));
    }
    return out;
}

// Matrix exponential (scaling-and-squaring Pade through Eigen). Templated so
// the same entry point serves the 2-4 dimensional operators and the d^2
// dimensional vectorized Liouvillians used as propagation oracles.
template <typename Derived>
auto expm(const Eigen::MatrixBase<Derived>& m) {
    return m.exp().eval();
}

// Kronecker product, A-index major. The models only ever need qubit x qubit.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    const auto n = a.rows() * b.rows();
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw DimensionMismatch("kron: factors must be square");
    if (n > 4)
        throw DimensionTooLarge("kron: product dimension exceeds 4");
    Matrix out(n, a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Reduced battery state of the charger (x) battery composite; basis ordering
// is charger-major, |c b> at index 2c + b.
inline Matrix partial_trace_charger(const Matrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw DimensionMismatch("partial_trace_charger: expected a 4x4 state");
    if (hermiticity_defect(rho) > 1e-10)
        throw NonHermitianInput("partial_trace_charger: state is not Hermitian");
    Matrix out(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = rho(i, j) + rho(2 + i, 2 + j);
    return out;
}

}  // namespace oqb
