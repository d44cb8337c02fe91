#pragma once

// Independent reference computations for the test suites. Nothing in here
// calls into the library's solvers or trackers.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Eigenvalues of [[a, b], [b, c]] from the characteristic polynomial, ascending.
inline std::pair<double, double> eig2x2(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double radius = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return {mean - radius, mean + radius};
}

/// Gauss-Jordan elimination with partial pivoting.
inline VectorXd gauss_solve(MatrixXd a, VectorXd b) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        a.row(k).swap(a.row(piv));
        std::swap(b(k), b(piv));
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a(i, k) / a(k, k);
            a.row(i) -= f * a.row(k);
            b(i) -= f * b(k);
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) b(k) /= a(k, k);
    return b;
}

inline MatrixXd gauss_inverse(const MatrixXd& a) {
    const Eigen::Index n = a.rows();
    MatrixXd inv(n, n);
    for (Eigen::Index j = 0; j < n; ++j) inv.col(j) = gauss_solve(a, VectorXd::Unit(n, j));
    return inv;
}

/// Random orthogonal matrix from Householder QR of a Gaussian matrix.
inline MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<MatrixXd> qr(g);
    return qr.householderQ() * MatrixXd::Identity(n, n);
}

/// SPD matrix with eigenvalues log-spaced in [lo, hi].
inline MatrixXd random_spd(Eigen::Index n, double lo, double hi, std::mt19937_64& rng) {
    const MatrixXd q = random_orthogonal(n, rng);
    VectorXd ev(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : double(i) / double(n - 1);
        ev(i) = lo * std::pow(hi / lo, t);
    }
    MatrixXd a = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

inline MatrixXd random_symmetric(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    MatrixXd a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) a(i, j) = a(j, i) = normal(rng);
    return a;
}

inline VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
}

/// Phi_n = lambda^n delta I + sum_k lambda^(n-k) x_k x_k^T by direct summation.
inline MatrixXd weighted_phi(const std::vector<VectorXd>& xs, double lambda, double delta) {
    const Eigen::Index n = xs.front().size();
    const auto steps = static_cast<int>(xs.size());
    MatrixXd phi = std::pow(lambda, steps) * delta * MatrixXd::Identity(n, n);
    for (int k = 0; k < steps; ++k) phi += std::pow(lambda, steps - 1 - k) * xs[static_cast<std::size_t>(k)] * xs[static_cast<std::size_t>(k)].transpose();
    return phi;
}

/// Batch least-squares solution of the exponentially weighted normal equations.
inline VectorXd weighted_ls(const std::vector<VectorXd>& xs, const std::vector<double>& ys, double lambda, double delta) {
    const MatrixXd phi = weighted_phi(xs, lambda, delta);
    VectorXd z = VectorXd::Zero(xs.front().size());
    const auto steps = static_cast<int>(xs.size());
    for (int k = 0; k < steps; ++k) z += std::pow(lambda, steps - 1 - k) * ys[static_cast<std::size_t>(k)] * xs[static_cast<std::size_t>(k)];
    return gauss_solve(phi, z);
}

}  // namespace oracle
