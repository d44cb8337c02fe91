#pragma once

// Closed-form performance predictors for the RTLS recursion: mean convergence
// rate, RLS bias, mean-square stability and steady-state / transient MSD.

#include "dcdrtls/eiv.hpp"
#include "dcdrtls/linalg.hpp"

namespace dcdrtls {

struct TheoryModel {
    MatrixXd R;
    VectorXd h;
    double eta = 0;
    double xi = 0;
    /// xi / eta when eta > 0
    double gamma = 1;
    double lambda = 1;

    /// Model with gamma = xi / eta (gamma is left at 1 when eta = 0).
    static TheoryModel from_noise(MatrixXd R, VectorXd h, double eta, double xi, double lambda);
    void validate() const;
};

/// rho{C} = eta / (zeta_min{gamma^-1 R h h^T + R} + eta); 0 when eta = 0.
double mean_convergence_rate(const TheoryModel& m);

/// b = -eta (R + eta I)^-1 h.
VectorXd rls_bias(const TheoryModel& m);

/// g = tr{R^-2 [(eta ||h||^2 + xi)(R + eta I) + eta^2 h h^T]}.
double noise_drive_g(const TheoryModel& m);

/// S = (1 - 2 lambda + 2 lambda^2) I + (1 - lambda)^2 (tr{R^-1} R - 2 eta R^-1 + eta^2 R^-2).
MatrixXd s_bar(const TheoryModel& m);
double s_bar_spectral_radius(const TheoryModel& m);

/// Lower bound on lambda for mean-square stability:
/// 1 - 2 / (tr{R^-1} zeta_max{R} + (1 - eta / zeta_min{R})^2 + 1).
double stability_lambda_bound(const TheoryModel& m);
double stability_lambda_bound(double trace_inv_r, double zeta_max, double zeta_min, double eta);

/// E||w~_n||^2 = (1 - 2 lambda + 2 lambda^2) E||w~_{n-1}||^2 + (1 - lambda)^2 g.
double transient_msd(double msd_prev, const TheoryModel& m);
/// Transient curve for n = 1..steps starting from ||h||^2 (w_0 = 0).
std::vector<double> transient_msd_curve(const TheoryModel& m, long steps);

/// ((1 - lambda) / (2 lambda)) g; exactly zero at lambda = 1.
double steady_state_msd(const TheoryModel& m);

struct AsymptoticMoments {
    MatrixXd phi_bar;
    VectorXd z_bar;
    double tau_bar = 0;
};

/// Limits of E[Phi_n], E[z_n], E[tau_n]; lambda = 1 raises DivergentMoments.
AsymptoticMoments asymptotic_moments(const TheoryModel& m);

}  // namespace dcdrtls
