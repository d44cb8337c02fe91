#pragma once

// Recursive total least-squares filters for errors-in-variables FIR
// identification, plus the least-squares baselines and batch references
// they are checked against.

#include <cmath>
#include <optional>

#include "dcdrtls/dcd.hpp"
#include "dcdrtls/error.hpp"
#include "dcdrtls/linalg.hpp"
#include "dcdrtls/op_counts.hpp"
#include "dcdrtls/stats.hpp"

namespace dcdrtls {

// ---------------------------------------------------------------------------
// DCD-RTLS
// ---------------------------------------------------------------------------

template <typename Scalar>
struct DcdRtlsConfig {
    Index dim = 8;
    ForgettingFactor<Scalar> lambda = ForgettingFactor<Scalar>::from_exponent(10);
    Scalar delta = Scalar(1e-2);
    /// xi / eta
    Scalar gamma = 1;
    DcdParams<Scalar> dcd{};
    /// Regressors are sliding windows of one scalar sequence.
    bool shift_structured = false;
    /// Keep the DCD step ladder across time steps instead of resetting it.
    bool warm_start_ladder = false;
};

/// Per-row tallies of one DCD-RTLS iteration, laid out like the algorithm table.
struct DcdRtlsStepOps {
    OpCounts phi;
    OpCounts z;
    OpCounts tau;
    OpCounts p1;
    OpCounts p2;
    OpCounts solve1;
    OpCounts solve2;
    OpCounts m_update;
    OpCounts k;
    OpCounts w;

    OpCounts total() const { return phi + z + tau + p1 + p2 + solve1 + solve2 + m_update + k + w; }
};

template <typename Scalar>
struct FilterState {
    Stats<Scalar> stats;
    Vector<Scalar> m1;
    Vector<Scalar> m2;
    Vector<Scalar> r1;
    Vector<Scalar> r2;
    Vector<Scalar> w;
    Vector<Scalar> w_prev;
    Vector<Scalar> w_prev2;
    Scalar gamma;
    Scalar inv_gamma;
    DcdParams<Scalar> dcd;
    bool shift_structured = false;
    std::optional<DcdLadder<Scalar>> ladder1;
    std::optional<DcdLadder<Scalar>> ladder2;
    /// accumulated over all steps
    OpCounts counts;
    DcdRtlsStepOps last_step;
};

template <typename Scalar>
FilterState<Scalar> make_filter_state(const DcdRtlsConfig<Scalar>& cfg) {
    if (!(cfg.gamma > 0) || !std::isfinite(double(cfg.gamma))) throw ConfigError("DCD-RTLS: gamma must be positive");
    cfg.dcd.validate();
    const Index dim = cfg.dim;
    auto stats = cfg.shift_structured ? init_stats_prewindowed(dim, cfg.lambda, cfg.delta)
                                      : init_stats(dim, cfg.lambda, cfg.delta);
    const Vector<Scalar> zero = Vector<Scalar>::Zero(dim);
    FilterState<Scalar> s{std::move(stats), zero, zero, zero, zero, zero, zero, zero, cfg.gamma, Scalar(1) / cfg.gamma, cfg.dcd,
                          cfg.shift_structured, std::nullopt, std::nullopt, {}, {}};
    if (cfg.warm_start_ladder) {
        s.ladder1 = DcdLadder<Scalar>::reset(cfg.dcd);
        s.ladder2 = DcdLadder<Scalar>::reset(cfg.dcd);
    }
    return s;
}

/// One DCD-RTLS iteration on the sample (x, y). Returns the new weights.
///
/// In shift-structured mode x must be the current window (x(n), ..., x(n-L+1)).
template <typename Scalar, typename DerivedX>
const Vector<Scalar>& dcd_rtls_step(FilterState<Scalar>& s, const Eigen::MatrixBase<DerivedX>& x, Scalar y) {
    const Index dim = s.stats.dim();
    if (x.size() != dim) throw InvalidInput("dcd_rtls_step: regressor length does not match L");
    DcdRtlsStepOps ops;
    const auto& lambda = s.stats.lambda;

    s.w_prev2 = s.w_prev;
    s.w_prev = s.w;

    StatsOps stats_ops;
    if (s.shift_structured)
        update_shift(s.stats, Scalar(x(0)), x, y, &stats_ops);
    else
        update_generic(s.stats, x, y, &stats_ops);
    ops.phi = stats_ops.phi;
    ops.z = stats_ops.cross;
    ops.tau = stats_ops.energy;

    // p1 = lambda r1 + (y - x^T m1) x
    Scalar e1 = y;
    for (Index i = 0; i < dim; ++i) e1 -= x(i) * s.m1(i);
    ops.p1.mul += std::uint64_t(dim);
    ops.p1.add += std::uint64_t(dim);  // L - 1 for the dot product, 1 for y - (.)
    Vector<Scalar> p1(dim);
    for (Index i = 0; i < dim; ++i) p1(i) = lambda.scale(s.r1(i), ops.p1) + e1 * x(i);
    ops.p1.mul += std::uint64_t(dim);
    ops.p1.add += std::uint64_t(dim);

    // p2 = lambda (r2 - w_{n-2}) + w_{n-1} - (x^T m2) x
    Scalar e2 = 0;
    for (Index i = 0; i < dim; ++i) e2 += x(i) * s.m2(i);
    ops.p2.mul += std::uint64_t(dim);
    ops.p2.add += std::uint64_t(dim - 1);
    Vector<Scalar> p2(dim);
    for (Index i = 0; i < dim; ++i) p2(i) = lambda.scale(s.r2(i) - s.w_prev2(i), ops.p2) + s.w_prev(i) - e2 * x(i);
    ops.p2.mul += std::uint64_t(dim);
    ops.p2.add += 3 * std::uint64_t(dim);

    auto ladder1 = s.ladder1 ? &*s.ladder1 : nullptr;
    auto ladder2 = s.ladder2 ? &*s.ladder2 : nullptr;
    auto sol1 = dcd_solve(s.stats.phi, p1, s.dcd, ladder1);
    auto sol2 = dcd_solve(s.stats.phi, p2, s.dcd, ladder2);
    ops.solve1 = sol1.counts;
    ops.solve2 = sol2.counts;

    s.m1 += sol1.d;
    s.m2 += sol2.d;
    ops.m_update.add += 2 * std::uint64_t(dim);
    s.r1 = std::move(sol1.r);
    s.r2 = std::move(sol2.r);

    // k = m1 + gamma^-1 tau m2
    const Scalar tau_scaled = s.inv_gamma * s.stats.tau;
    ++ops.k.mul;
    Vector<Scalar> k = s.m1 + tau_scaled * s.m2;
    ops.k.mul += std::uint64_t(dim);
    ops.k.add += std::uint64_t(dim);

    // w = k - (z^T k / (gamma + z^T m2)) m2
    const Scalar zm2 = s.stats.z.dot(s.m2);
    const Scalar zk = s.stats.z.dot(k);
    const Scalar denom = s.gamma + zm2;
    ops.w.mul += 2 * std::uint64_t(dim);
    ops.w.add += 2 * std::uint64_t(dim - 1) + 1;
    const Scalar guard = Scalar(1e-12) * (s.gamma + s.stats.z.norm() * s.m2.norm());
    if (!(std::abs(denom) >= guard)) throw DegenerateDenominator("dcd_rtls_step: gamma + z^T m2 vanished");
    const Scalar ratio = zk / denom;
    ++ops.w.div;
    s.w = k - ratio * s.m2;
    ops.w.mul += std::uint64_t(dim);
    ops.w.add += std::uint64_t(dim);

    s.last_step = ops;
    s.counts += ops.total();
    return s.w;
}

// ---------------------------------------------------------------------------
// Exact RTLS references
// ---------------------------------------------------------------------------

/// w_n = (Phi_n + gamma^-1 w_{n-1} z_n^T)^-1 (z_n + gamma^-1 tau_n w_{n-1}) by a dense solve.
template <typename Scalar, typename DerivedW>
Vector<Scalar> exact_rtls_step_direct(const Stats<Scalar>& stats, const Eigen::MatrixBase<DerivedW>& w_prev,
                                      Scalar gamma) {
    if (!(gamma > 0)) throw ConfigError("exact_rtls_step_direct: gamma must be positive");
    if (w_prev.size() != stats.dim()) throw InvalidInput("exact_rtls_step_direct: dimension mismatch");
    const Matrix<Scalar> a = stats.phi_full() + (w_prev * stats.z.transpose()) / gamma;
    const Vector<Scalar> b = stats.z + (stats.tau / gamma) * w_prev;
    Eigen::FullPivLU<Matrix<Scalar>> lu(a);
    if (!lu.isInvertible()) throw SingularMatrix("exact_rtls_step_direct: system matrix is singular");
    return lu.solve(b);
}

/// Rank-one recursion for Phi^-1 after Phi_n = lambda Phi_{n-1} + x x^T.
template <typename Scalar, typename DerivedX>
void update_phi_inverse(Matrix<Scalar>& phi_inv, const Eigen::MatrixBase<DerivedX>& x, Scalar lambda) {
    const Vector<Scalar> gain = phi_inv * x;
    const Scalar denom = lambda + x.dot(gain);
    phi_inv = (phi_inv - (gain * gain.transpose()) / denom) / lambda;
}

/// Sherman-Morrison form of the RTLS update given the exact inverse Phi_n^-1.
template <typename Scalar, typename DerivedW>
Vector<Scalar> exact_rtls_step_sm(const Matrix<Scalar>& phi_inv, const Vector<Scalar>& z, Scalar tau,
                                  const Eigen::MatrixBase<DerivedW>& w_prev, Scalar gamma) {
    if (!(gamma > 0)) throw ConfigError("exact_rtls_step_sm: gamma must be positive");
    const Vector<Scalar> u = phi_inv * w_prev;
    const Scalar denom = gamma + z.dot(u);
    if (!(std::abs(denom) > Scalar(0)) || !std::isfinite(double(denom)))
        throw DegenerateDenominator("exact_rtls_step_sm: gamma + z^T Phi^-1 w vanished");
    const Vector<Scalar> b = z + (tau / gamma) * w_prev;
    const Vector<Scalar> phi_inv_b = phi_inv * b;
    // (Phi^-1 - Phi^-1 w z^T Phi^-1 / denom) b
    return phi_inv_b - u * (z.dot(phi_inv_b) / denom);
}

/// Exact RTLS filter driven by the dense solve.
template <typename Scalar>
struct ExactRtlsState {
    Stats<Scalar> stats;
    Vector<Scalar> w;
    Scalar gamma;
};

template <typename Scalar>
ExactRtlsState<Scalar> make_exact_rtls(Index dim, ForgettingFactor<Scalar> lambda, Scalar delta, Scalar gamma) {
    if (!(gamma > 0)) throw ConfigError("exact RTLS: gamma must be positive");
    return {init_stats(dim, lambda, delta), Vector<Scalar>::Zero(dim), gamma};
}

template <typename Scalar, typename DerivedX>
const Vector<Scalar>& exact_rtls_step(ExactRtlsState<Scalar>& s, const Eigen::MatrixBase<DerivedX>& x, Scalar y) {
    update_generic(s.stats, x, y);
    s.w = exact_rtls_step_direct(s.stats, s.w, s.gamma);
    return s.w;
}

// ---------------------------------------------------------------------------
// Least-squares baselines
// ---------------------------------------------------------------------------

template <typename Scalar>
struct RlsState {
    Matrix<Scalar> phi_inv;
    Vector<Scalar> z;
    Vector<Scalar> w;
    Scalar lambda;
};

template <typename Scalar>
RlsState<Scalar> make_rls(Index dim, Scalar lambda, Scalar delta) {
    if (!(lambda > 0 && lambda <= 1)) throw ConfigError("RLS: lambda must lie in (0, 1]");
    if (!(delta > 0)) throw ConfigError("RLS: delta must be positive");
    return {Matrix<Scalar>::Identity(dim, dim) / delta, Vector<Scalar>::Zero(dim), Vector<Scalar>::Zero(dim), lambda};
}

/// Exponentially weighted RLS; w tracks Phi_n^-1 z_n through the a-priori error.
template <typename Scalar, typename DerivedX>
const Vector<Scalar>& rls_step(RlsState<Scalar>& s, const Eigen::MatrixBase<DerivedX>& x, Scalar y) {
    if (x.size() != s.w.size()) throw InvalidInput("rls_step: regressor length does not match L");
    const Vector<Scalar> px = s.phi_inv * x;
    const Scalar denom = s.lambda + x.dot(px);
    const Vector<Scalar> gain = px / denom;
    const Scalar error = y - s.w.dot(x);
    s.w += gain * error;
    s.phi_inv = (s.phi_inv - gain * px.transpose()) / s.lambda;
    s.z = s.lambda * s.z + y * x;
    return s.w;
}

/// Bias-compensated RLS with known input-noise variance:
/// w_n = Phi_n^-1 z_n + (1 - lambda)^-1 eta Phi_n^-1 w_{n-1}.
template <typename Scalar, typename DerivedW>
Vector<Scalar> bcrls_step_direct(const Stats<Scalar>& stats, const Eigen::MatrixBase<DerivedW>& w_prev, Scalar eta) {
    const Scalar lambda = stats.lambda.value();
    if (!(lambda < 1)) throw ConfigError("bcrls: lambda must be below 1");
    const Vector<Scalar> rhs = stats.z + (eta / (Scalar(1) - lambda)) * w_prev;
    return solve_spd(stats.phi, rhs);
}

template <typename Scalar>
struct BcrlsState {
    Stats<Scalar> stats;
    Vector<Scalar> w;
    Scalar eta;
};

template <typename Scalar>
BcrlsState<Scalar> make_bcrls(Index dim, ForgettingFactor<Scalar> lambda, Scalar delta, Scalar eta) {
    if (!(eta >= 0)) throw ConfigError("BCRLS: eta must be nonnegative");
    return {init_stats(dim, lambda, delta), Vector<Scalar>::Zero(dim), eta};
}

template <typename Scalar, typename DerivedX>
const Vector<Scalar>& bcrls_step(BcrlsState<Scalar>& s, const Eigen::MatrixBase<DerivedX>& x, Scalar y) {
    update_generic(s.stats, x, y);
    s.w = bcrls_step_direct(s.stats, s.w, s.eta);
    return s.w;
}

// ---------------------------------------------------------------------------
// Batch TLS and inverse power iteration
// ---------------------------------------------------------------------------

template <typename Scalar>
struct TlsSolution {
    Vector<Scalar> w;
    /// The two smallest |eigenvalues| of Psi nearly coincide; inverse
    /// iteration on such a Psi converges slowly or not at all.
    bool ill_conditioned = false;
};

/// TLS weights from the minor eigenvector q of Psi: [w; -1] = -q / (gamma^-1/2 q_{L+1}).
template <typename Scalar>
TlsSolution<Scalar> batch_tls(const AugmentedStats<Scalar>& aug) {
    if (!(aug.gamma > 0)) throw ConfigError("batch_tls: gamma must be positive");
    const Index dim = aug.psi.rows() - 1;
    if (dim < 1) throw InvalidInput("batch_tls: Psi must be at least 2 x 2");
    const auto eig = sym_eig(aug.psi);
    const Vector<Scalar> q = eig.eigenvectors.col(0);
    if (std::abs(q(dim)) < Scalar(1e-12)) throw NonGenericTls("batch_tls: last entry of the minor eigenvector vanishes");
    TlsSolution<Scalar> out;
    out.w = -q.head(dim) / (q(dim) / std::sqrt(aug.gamma));
    out.ill_conditioned = std::abs(eig.eigenvalues(1)) - std::abs(eig.eigenvalues(0)) < Scalar(1e-10);
    return out;
}

/// One inverse-power iterate q = Psi^-1 q_prev, normalized to unit length.
template <typename Scalar, typename DerivedQ>
Vector<Scalar> inverse_power_reference(const AugmentedStats<Scalar>& aug, const Eigen::MatrixBase<DerivedQ>& q_prev) {
    if (q_prev.size() != aug.psi.rows()) throw InvalidInput("inverse_power_reference: dimension mismatch");
    Eigen::FullPivLU<Matrix<Scalar>> lu(aug.psi);
    if (!lu.isInvertible()) throw SingularMatrix("inverse_power_reference: Psi is singular");
    Vector<Scalar> q = lu.solve(q_prev);
    const Scalar norm = q.norm();
    if (!(norm > 0) || !std::isfinite(double(norm))) throw SingularMatrix("inverse_power_reference: iterate collapsed");
    return q / norm;
}

}  // namespace dcdrtls
