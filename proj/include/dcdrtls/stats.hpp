#pragma once

// Exponentially weighted second-order statistics of a noisy input/output
// stream: the input autocorrelation Phi, the cross-correlation z and the
// output energy tau, plus the augmented covariance Psi built from them.

#include <cmath>
#include <optional>
#include <string>

#include "dcdrtls/error.hpp"
#include "dcdrtls/linalg.hpp"
#include "dcdrtls/op_counts.hpp"

namespace dcdrtls {

/// Forgetting factor lambda. When built from an exponent P the value is
/// exactly 1 - 2^-P and scaling by it is done as a - 2^-P a (a shift and an
/// add), which rounds identically to the product lambda * a.
template <typename Scalar>
class ForgettingFactor {
public:
    static ForgettingFactor from_value(Scalar lambda) {
        if (!(lambda > 0 && lambda <= 1))
            throw ConfigError("forgetting factor must lie in (0, 1], got " + std::to_string(double(lambda)));
        return ForgettingFactor(lambda, std::nullopt);
    }

    static ForgettingFactor from_exponent(int p) {
        if (p < 1 || p > 52) throw ConfigError("forgetting exponent P must lie in [1, 52]");
        return ForgettingFactor(Scalar(1) - std::ldexp(Scalar(1), -p), p);
    }

    Scalar value() const { return value_; }
    std::optional<int> exponent() const { return exponent_; }
    bool shift_add() const { return exponent_.has_value(); }

    Scalar scale(Scalar a, OpCounts& ops) const {
        if (exponent_) {
            ++ops.add;
            return a - std::ldexp(a, -*exponent_);
        }
        ++ops.mul;
        return value_ * a;
    }

private:
    ForgettingFactor(Scalar value, std::optional<int> exponent) : value_(value), exponent_(exponent) {}

    Scalar value_;
    std::optional<int> exponent_;
};

template <typename Scalar>
struct Stats {
    /// L x L, upper triangle authoritative.
    Matrix<Scalar> phi;
    Vector<Scalar> z;
    Scalar tau = 0;
    ForgettingFactor<Scalar> lambda;
    long n = 0;

    Index dim() const { return z.size(); }
    Matrix<Scalar> phi_full() const { return symmetrize_upper(phi); }
};

/// Per-row operation tallies of one statistics update.
struct StatsOps {
    OpCounts phi;
    OpCounts cross;   // z
    OpCounts energy;  // tau

    OpCounts total() const { return phi + cross + energy; }
};

/// Phi_0 = delta I, z_0 = 0, tau_0 = 0.
template <typename Scalar>
Stats<Scalar> init_stats(Index dim, ForgettingFactor<Scalar> lambda, Scalar delta) {
    if (dim < 1) throw ConfigError("init_stats: dimension must be >= 1");
    if (!(delta > 0) || !std::isfinite(double(delta))) throw ConfigError("init_stats: delta must be positive");
    return Stats<Scalar>{Matrix<Scalar>::Identity(dim, dim) * delta, Vector<Scalar>::Zero(dim), Scalar(0),
                         lambda, 0};
}

/// Initialization for pre-windowed shift-structured data:
/// Phi_0 = delta diag(1, lambda^-1, ..., lambda^-(L-1)).
///
/// With this diagonal the block-copy update of update_shift() reproduces the
/// generic recursion exactly, since the regularizer itself is shift-invariant
/// under one step of forgetting.
template <typename Scalar>
Stats<Scalar> init_stats_prewindowed(Index dim, ForgettingFactor<Scalar> lambda, Scalar delta) {
    auto s = init_stats(dim, lambda, delta);
    Scalar d = delta;
    for (Index k = 0; k < dim; ++k) {
        s.phi(k, k) = d;
        d /= lambda.value();
    }
    return s;
}

namespace detail {

template <typename Scalar, typename DerivedX>
void update_cross_and_energy(Stats<Scalar>& s, const Eigen::MatrixBase<DerivedX>& x, Scalar y, StatsOps& ops) {
    const Index dim = s.dim();
    for (Index i = 0; i < dim; ++i) {
        s.z(i) = s.lambda.scale(s.z(i), ops.cross) + y * x(i);
        ++ops.cross.mul;
        ++ops.cross.add;
    }
    s.tau = s.lambda.scale(s.tau, ops.energy) + y * y;
    ++ops.energy.mul;
    ++ops.energy.add;
}

template <typename Scalar, typename DerivedX>
void check_regressor(const Stats<Scalar>& s, const Eigen::MatrixBase<DerivedX>& x, Scalar y) {
    if (x.size() != s.dim()) throw InvalidInput("stats update: regressor length does not match L");
    if (!x.allFinite() || !std::isfinite(double(y))) throw InvalidInput("stats update: non-finite sample");
}

}  // namespace detail

/// Phi_n = lambda Phi_{n-1} + x x^T (upper triangle only),
/// z_n = lambda z_{n-1} + y x, tau_n = lambda tau_{n-1} + y^2.
template <typename Scalar, typename DerivedX>
void update_generic(Stats<Scalar>& s, const Eigen::MatrixBase<DerivedX>& x, Scalar y, StatsOps* ops = nullptr) {
    detail::check_regressor(s, x, y);
    StatsOps local;
    StatsOps& tally = ops ? *ops : local;
    const Index dim = s.dim();
    for (Index j = 0; j < dim; ++j) {
        for (Index i = 0; i <= j; ++i) {
            s.phi(i, j) = s.lambda.scale(s.phi(i, j), tally.phi) + x(i) * x(j);
            ++tally.phi.mul;
            ++tally.phi.add;
        }
    }
    detail::update_cross_and_energy(s, x, y, tally);
    ++s.n;
}

/// Same recursion for a shift-structured regressor window = (x(n), ..., x(n-L+1)).
/// The upper-left (L-1) x (L-1) block of Phi_{n-1} moves to the lower-right
/// block of Phi_n and only the first row is recomputed.
template <typename Scalar, typename DerivedX>
void update_shift(Stats<Scalar>& s, Scalar x_new, const Eigen::MatrixBase<DerivedX>& window, Scalar y,
                  StatsOps* ops = nullptr) {
    detail::check_regressor(s, window, y);
    if (window(0) != x_new) throw InvalidInput("update_shift: window(0) must equal the newest input sample");
    StatsOps local;
    StatsOps& tally = ops ? *ops : local;
    const Index dim = s.dim();
    // descending order keeps every source entry intact until it has been copied
    for (Index j = dim - 2; j >= 0; --j)
        for (Index i = j; i >= 0; --i) s.phi(i + 1, j + 1) = s.phi(i, j);
    for (Index k = 0; k < dim; ++k) {
        s.phi(0, k) = s.lambda.scale(s.phi(0, k), tally.phi) + x_new * window(k);
        ++tally.phi.mul;
        ++tally.phi.add;
    }
    detail::update_cross_and_energy(s, window, y, tally);
    ++s.n;
}

template <typename Scalar>
struct AugmentedStats {
    /// (L+1) x (L+1), fully populated.
    Matrix<Scalar> psi;
    Scalar gamma;
};

/// Psi = [Phi, gamma^-1/2 z; gamma^-1/2 z^T, gamma^-1 tau].
template <typename Scalar>
AugmentedStats<Scalar> assemble_psi(const Stats<Scalar>& s, Scalar gamma) {
    if (!(gamma > 0) || !std::isfinite(double(gamma))) throw ConfigError("assemble_psi: gamma must be positive");
    const Index dim = s.dim();
    AugmentedStats<Scalar> out{Matrix<Scalar>(dim + 1, dim + 1), gamma};
    out.psi.topLeftCorner(dim, dim) = s.phi_full();
    const Scalar border = Scalar(1) / std::sqrt(gamma);
    out.psi.col(dim).head(dim) = border * s.z;
    out.psi.row(dim).head(dim) = (border * s.z).transpose();
    out.psi(dim, dim) = s.tau / gamma;
    return out;
}

}  // namespace dcdrtls
