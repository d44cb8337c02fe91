#pragma once

// Leading-element dichotomous coordinate descent (DCD) for Phi d = p.
//
// The solution entries live on the binary grid k * H * 2^-M. Each successful
// iteration picks the residual entry of largest magnitude, shrinks the step
// alpha by halving until it is small enough to reduce the quadratic cost along
// that coordinate, then moves d_l by +-alpha and subtracts +-alpha times column
// l of Phi from the residual. No multiplications are needed when H is a power
// of two: every step is a shift and an add.

#include <cmath>

#include "dcdrtls/error.hpp"
#include "dcdrtls/linalg.hpp"
#include "dcdrtls/op_counts.hpp"

namespace dcdrtls {

template <typename Scalar>
struct DcdParams {
    int n_max = 1;         // N: successful coordinate updates per call
    int m_bits = 16;       // M: bits of the step ladder
    Scalar h_range = 1;    // H: amplitude range of the solution entries

    void validate() const {
        if (n_max < 1) throw ConfigError("DCD: N must be >= 1");
        if (m_bits < 1) throw ConfigError("DCD: M must be >= 1");
        if (!(h_range > 0) || !std::isfinite(double(h_range))) throw ConfigError("DCD: H must be positive");
    }

    /// Worst-case additions of one call: 2NL + N + M.
    std::uint64_t add_budget(Index dim) const {
        return 2ull * std::uint64_t(n_max) * std::uint64_t(dim) + std::uint64_t(n_max) + std::uint64_t(m_bits);
    }
};

/// Step-size ladder state (epsilon, alpha).
template <typename Scalar>
struct DcdLadder {
    int epsilon = 1;
    Scalar alpha = Scalar(0.5);

    static DcdLadder reset(const DcdParams<Scalar>& params) { return {1, params.h_range / 2}; }
};

template <typename Scalar>
struct DcdResult {
    Vector<Scalar> d;
    /// p - Phi d, accumulated by the update loop
    Vector<Scalar> r;
    int updates_done = 0;
    int halvings_done = 0;
    /// true when the ladder ran past M bits
    bool ladder_exhausted = false;
    OpCounts counts;
};

/// Approximately solve Phi d = p.
///
/// `phi` is symmetric with its upper triangle authoritative and must have a
/// strictly positive diagonal. Without `ladder` the step ladder starts from
/// (1, H/2) on every call. With `ladder` the call starts from the supplied
/// state and writes the final state back, which lets a caller warm-start
/// successive solves.
template <typename DerivedPhi, typename DerivedP>
DcdResult<typename DerivedPhi::Scalar> dcd_solve(const Eigen::MatrixBase<DerivedPhi>& phi,
                                                 const Eigen::MatrixBase<DerivedP>& p,
                                                 const DcdParams<typename DerivedPhi::Scalar>& params,
                                                 DcdLadder<typename DerivedPhi::Scalar>* ladder = nullptr) {
    using Scalar = typename DerivedPhi::Scalar;
    params.validate();
    const Index dim = phi.rows();
    if (phi.cols() != dim || p.size() != dim) throw InvalidInput("dcd_solve: dimension mismatch");
    for (Index k = 0; k < dim; ++k)
        if (!(phi(k, k) > 0)) throw InvalidInput("dcd_solve: diagonal of Phi must be strictly positive");

    DcdLadder<Scalar> state = ladder ? *ladder : DcdLadder<Scalar>::reset(params);
    DcdResult<Scalar> out{Vector<Scalar>::Zero(dim), p, 0, 0, false, {}};
    Vector<Scalar>& d = out.d;
    Vector<Scalar>& r = out.r;

    for (int j = 0; j < params.n_max; ++j) {
        Index l = 0;
        r.cwiseAbs().maxCoeff(&l);
        out.counts.add += std::uint64_t(dim - 1);

        const Scalar magnitude = std::abs(r(l));
        const Scalar diag = phi(l, l);
        while (state.epsilon <= params.m_bits) {
            ++out.counts.add;  // |r_l| <= (alpha / 2) phi_ll
            if (magnitude > std::ldexp(state.alpha, -1) * diag) break;
            ++state.epsilon;
            state.alpha = std::ldexp(state.alpha, -1);
            ++out.halvings_done;
        }
        if (state.epsilon > params.m_bits) {
            out.ladder_exhausted = true;
            break;
        }

        const Scalar step = r(l) >= 0 ? state.alpha : -state.alpha;
        d(l) += step;
        ++out.counts.add;
        for (Index k = 0; k < dim; ++k) r(k) -= step * sym_at(phi, k, l);
        out.counts.add += std::uint64_t(dim);
        ++out.updates_done;
    }

    if (ladder) *ladder = state;
    return out;
}

}  // namespace dcdrtls
