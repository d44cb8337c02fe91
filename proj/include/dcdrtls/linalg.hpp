#pragma once

// Small dense symmetric linear algebra on top of Eigen.
//
// Symmetric matrices are held in ordinary dense Eigen matrices. Only the upper
// triangle is authoritative: every routine in this header reads the upper
// triangle and ignores whatever sits below the diagonal. That lets the
// statistics trackers update just the upper half, as a hardware implementation
// would.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dcdrtls/error.hpp"

namespace dcdrtls {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Entry (i, j) of a symmetric matrix whose upper triangle is authoritative.
template <typename Derived>
inline typename Derived::Scalar sym_at(const Eigen::MatrixBase<Derived>& a, Index i, Index j) {
    return i <= j ? a(i, j) : a(j, i);
}

/// Full symmetric copy built from the upper triangle.
template <typename Derived>
Matrix<typename Derived::Scalar> symmetrize_upper(const Eigen::MatrixBase<Derived>& a) {
    return a.template selfadjointView<Eigen::Upper>();
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& a) {
    return a.allFinite();
}

template <typename Scalar>
struct EigDecomposition {
    /// Sorted ascending by absolute value.
    Vector<Scalar> eigenvalues;
    /// Column i is the unit eigenvector for eigenvalues(i).
    Matrix<Scalar> eigenvectors;
    int sweeps = 0;
};

namespace detail {

template <typename Scalar>
Scalar off_diagonal_norm(const Matrix<Scalar>& a) {
    Scalar sum = 0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < j; ++i) sum += 2 * a(i, j) * a(i, j);
    return std::sqrt(sum);
}

template <typename Scalar>
Scalar jacobi_tolerance() {
    return std::max(Scalar(1e-12), Scalar(8) * std::numeric_limits<Scalar>::epsilon());
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps over all (p, q) pairs until the off-diagonal Frobenius norm drops
/// below 1e-12 times the Frobenius norm of the input, capped at 100 sweeps.
template <typename Derived>
EigDecomposition<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& input) {
    using Scalar = typename Derived::Scalar;
    if (input.rows() != input.cols() || input.rows() < 1)
        throw InvalidInput("sym_eig: matrix must be square with dim >= 1");

    Matrix<Scalar> a = symmetrize_upper(input);
    if (!a.allFinite()) throw InvalidInput("sym_eig: non-finite entry");

    const Index n = a.rows();
    Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);
    const Scalar scale = a.norm();
    const Scalar tol = detail::jacobi_tolerance<Scalar>() * scale;

    int sweep = 0;
    constexpr int kMaxSweeps = 100;
    while (sweep < kMaxSweeps && scale > 0 && detail::off_diagonal_norm(a) > tol) {
        ++sweep;
        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const Scalar apq = a(p, q);
                if (apq == Scalar(0)) continue;
                // Golub & Van Loan sym.schur2
                const Scalar theta = (a(q, q) - a(p, p)) / (2 * apq);
                const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                                 (std::abs(theta) + std::sqrt(Scalar(1) + theta * theta));
                const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
                const Scalar s = t * c;
                for (Index k = 0; k < n; ++k) {
                    const Scalar akp = a(k, p);
                    const Scalar akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < n; ++k) {
                    const Scalar apk = a(p, k);
                    const Scalar aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0;
                for (Index k = 0; k < n; ++k) {
                    const Scalar vkp = v(k, p);
                    const Scalar vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
        return std::abs(a(i, i)) < std::abs(a(j, j));
    });

    EigDecomposition<Scalar> out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    out.sweeps = sweep;
    for (Index k = 0; k < n; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = a(src, src);
        Vector<Scalar> col = v.col(src);
        col.normalize();
        // deterministic sign: largest-magnitude component positive
        Index imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        if (col(imax) < 0) col = -col;
        out.eigenvectors.col(k) = col;
    }
    return out;
}

/// Solve A x = b for symmetric positive-definite A via Cholesky.
/// A non-positive pivot raises SingularMatrix.
template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> solve_spd(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != a.cols() || a.rows() != b.rows() || b.cols() != 1)
        throw InvalidInput("solve_spd: dimension mismatch");
    if (!a.template triangularView<Eigen::Upper>().toDenseMatrix().allFinite() || !b.allFinite())
        throw InvalidInput("solve_spd: non-finite input");
    Eigen::LLT<Matrix<Scalar>, Eigen::Upper> llt(a);
    if (llt.info() != Eigen::Success)
        throw SingularMatrix("solve_spd: matrix is not positive-definite");
    return llt.solve(b);
}

/// Throws SingularMatrix unless the (upper-triangle) symmetric matrix is positive-definite.
template <typename Derived>
void require_positive_definite(const Eigen::MatrixBase<Derived>& a, const char* what) {
    using Scalar = typename Derived::Scalar;
    if (a.rows() != a.cols()) throw InvalidInput(std::string(what) + ": matrix must be square");
    if (!a.template triangularView<Eigen::Upper>().toDenseMatrix().allFinite())
        throw InvalidInput(std::string(what) + ": non-finite input");
    Eigen::LLT<Matrix<Scalar>, Eigen::Upper> llt(a);
    if (llt.info() != Eigen::Success)
        throw SingularMatrix(std::string(what) + ": matrix is not positive-definite");
}

/// tr{A^-1} as the sum of eigenvalue reciprocals; A must be positive-definite.
template <typename Derived>
typename Derived::Scalar trace_inverse(const Eigen::MatrixBase<Derived>& a) {
    require_positive_definite(a, "trace_inverse");
    return sym_eig(a).eigenvalues.cwiseInverse().sum();
}

/// Largest eigenvalue magnitude of a symmetric matrix.
template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& a) {
    const auto eig = sym_eig(a);
    return eig.eigenvalues.cwiseAbs().maxCoeff();
}

/// Symmetric square root of a positive semi-definite matrix.
template <typename Derived>
Matrix<typename Derived::Scalar> sym_sqrt(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    const auto eig = sym_eig(a);
    if (eig.eigenvalues.minCoeff() < 0) throw InvalidInput("sym_sqrt: negative eigenvalue");
    const Vector<Scalar> root = eig.eigenvalues.cwiseSqrt();
    return eig.eigenvectors * root.asDiagonal() * eig.eigenvectors.transpose();
}

}  // namespace dcdrtls
