#include "dcdrtls/theory.hpp"

#include <cmath>

#include "dcdrtls/error.hpp"

namespace dcdrtls {

TheoryModel TheoryModel::from_noise(MatrixXd R, VectorXd h, double eta, double xi, double lambda) {
    TheoryModel m{std::move(R), std::move(h), eta, xi, 1.0, lambda};
    if (eta > 0) m.gamma = xi / eta;
    m.validate();
    return m;
}

void TheoryModel::validate() const {
    const Index dim = h.size();
    if (dim < 1 || R.rows() != dim || R.cols() != dim) throw InvalidModel("theory: R must be L x L with L = len(h)");
    if (!(eta >= 0) || !(xi >= 0)) throw InvalidModel("theory: noise variances must be nonnegative");
    if (!(lambda > 0 && lambda <= 1)) throw InvalidModel("theory: lambda must lie in (0, 1]");
    try {
        require_positive_definite(R, "theory");
    } catch (const Error&) {
        throw InvalidModel("theory: R must be positive-definite");
    }
}

namespace {

MatrixXd inverse_spd(const MatrixXd& a) {
    const Index dim = a.rows();
    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw InvalidModel("theory: R must be positive-definite");
    return llt.solve(MatrixXd::Identity(dim, dim));
}

// tr{R^-2 M} for the noise-drive matrix M written without gamma:
// M = (eta ||h||^2 + xi)(R + eta I) + eta^2 h h^T
double noise_drive(const TheoryModel& m) {
    const Index dim = m.h.size();
    const MatrixXd r_inv = inverse_spd(m.R);
    const MatrixXd r_inv2 = r_inv * r_inv;
    const double hh = m.h.squaredNorm();
    const MatrixXd drive = (m.eta * hh + m.xi) * (m.R + m.eta * MatrixXd::Identity(dim, dim)) +
                           m.eta * m.eta * m.h * m.h.transpose();
    return (r_inv2 * drive).trace();
}

}  // namespace

double mean_convergence_rate(const TheoryModel& m) {
    m.validate();
    if (m.eta == 0) return 0.0;
    if (!(m.gamma > 0)) throw InvalidModel("mean_convergence_rate: gamma must be positive when eta > 0");
    const Index dim = m.h.size();
    // gamma^-1 R h h^T + R = R (gamma^-1 h h^T + I) is similar to the symmetric
    // R^1/2 (gamma^-1 h h^T + I) R^1/2
    const MatrixXd root = sym_sqrt(m.R);
    const MatrixXd inner = m.h * m.h.transpose() / m.gamma + MatrixXd::Identity(dim, dim);
    const MatrixXd sym = root * inner * root;
    const double zeta_min = sym_eig(sym).eigenvalues(0);
    return m.eta / (zeta_min + m.eta);
}

VectorXd rls_bias(const TheoryModel& m) {
    m.validate();
    const Index dim = m.h.size();
    if (m.eta == 0) return VectorXd::Zero(dim);
    const MatrixXd shifted = m.R + m.eta * MatrixXd::Identity(dim, dim);
    return -m.eta * solve_spd(shifted, m.h);
}

double noise_drive_g(const TheoryModel& m) {
    m.validate();
    return noise_drive(m);
}

MatrixXd s_bar(const TheoryModel& m) {
    m.validate();
    const Index dim = m.h.size();
    const MatrixXd r_inv = inverse_spd(m.R);
    const double tr_inv = trace_inverse(m.R);
    const double lam = m.lambda;
    const double lead = 1.0 - 2.0 * lam + 2.0 * lam * lam;
    const double tail = (1.0 - lam) * (1.0 - lam);
    MatrixXd s = lead * MatrixXd::Identity(dim, dim) +
                 tail * (tr_inv * m.R - 2.0 * m.eta * r_inv + m.eta * m.eta * r_inv * r_inv);
    return (0.5 * (s + s.transpose())).eval();
}

double s_bar_spectral_radius(const TheoryModel& m) { return spectral_radius(s_bar(m)); }

double stability_lambda_bound(double trace_inv_r, double zeta_max, double zeta_min, double eta) {
    if (!(zeta_min > 0) || !(zeta_max >= zeta_min)) throw InvalidModel("stability bound: need 0 < zeta_min <= zeta_max");
    const double ratio = 1.0 - eta / zeta_min;
    return 1.0 - 2.0 / (trace_inv_r * zeta_max + ratio * ratio + 1.0);
}

double stability_lambda_bound(const TheoryModel& m) {
    m.validate();
    const auto eig = sym_eig(m.R);
    const double zeta_min = eig.eigenvalues.minCoeff();
    const double zeta_max = eig.eigenvalues.maxCoeff();
    return stability_lambda_bound(eig.eigenvalues.cwiseInverse().sum(), zeta_max, zeta_min, m.eta);
}

double transient_msd(double msd_prev, const TheoryModel& m) {
    if (!(msd_prev >= 0)) throw InvalidInput("transient_msd: previous MSD must be nonnegative");
    const double lam = m.lambda;
    const double ratio = 1.0 - 2.0 * lam + 2.0 * lam * lam;
    const double drive = (1.0 - lam) * (1.0 - lam);
    if (drive == 0.0) return ratio * msd_prev;
    return ratio * msd_prev + drive * noise_drive_g(m);
}

std::vector<double> transient_msd_curve(const TheoryModel& m, long steps) {
    m.validate();
    const double lam = m.lambda;
    const double ratio = 1.0 - 2.0 * lam + 2.0 * lam * lam;
    const double drive = (1.0 - lam) * (1.0 - lam) * noise_drive(m);
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(std::max(0L, steps)));
    double msd = m.h.squaredNorm();
    for (long n = 0; n < steps; ++n) {
        msd = ratio * msd + drive;
        curve.push_back(msd);
    }
    return curve;
}

double steady_state_msd(const TheoryModel& m) {
    m.validate();
    const double factor = (1.0 - m.lambda) / (2.0 * m.lambda);
    if (factor == 0.0) return 0.0;
    return factor * noise_drive(m);
}

AsymptoticMoments asymptotic_moments(const TheoryModel& m) {
    m.validate();
    if (!(m.lambda < 1)) throw DivergentMoments("asymptotic moments diverge at lambda = 1");
    const Index dim = m.h.size();
    const double scale = 1.0 / (1.0 - m.lambda);
    AsymptoticMoments out;
    out.phi_bar = scale * (m.R + m.eta * MatrixXd::Identity(dim, dim));
    out.z_bar = scale * (m.R * m.h);
    out.tau_bar = scale * (m.h.dot(m.R * m.h) + m.xi);
    return out;
}

}  // namespace dcdrtls
