#include <doctest.h>

#include <random>

#include "dcdrtls/eiv.hpp"
#include "dcdrtls/theory.hpp"
#include "oracles.hpp"

using namespace dcdrtls;

namespace {

TheoryModel identity_model(Index dim, const VectorXd& h, double eta, double xi, double lambda) {
    return TheoryModel::from_noise(MatrixXd::Identity(dim, dim), h, eta, xi, lambda);
}

TheoryModel random_model(std::mt19937_64& rng, double lambda) {
    std::uniform_int_distribution<int> dims(1, 10);
    std::uniform_real_distribution<double> noise(0.0, 0.5);
    const int dim = dims(rng);
    const MatrixXd r = oracle::random_spd(dim, 0.2, 1.8, rng);
    const double eta = noise(rng);
    return TheoryModel::from_noise(r, oracle::random_vector(dim, rng), eta, noise(rng), lambda);
}

}  // namespace

TEST_CASE("mean convergence rate") {
    CHECK(mean_convergence_rate(identity_model(3, VectorXd::Ones(3), 0.0, 0.1, 0.99)) == 0.0);
    CHECK(mean_convergence_rate(identity_model(3, VectorXd::Zero(3), 1.0, 1.0, 0.99)) == doctest::Approx(0.5));
    const VectorXd unit = VectorXd::Unit(4, 1);
    CHECK(mean_convergence_rate(identity_model(4, unit, 0.5, 0.5, 0.99)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("mean convergence rate uses the non-symmetric spectrum") {
    // the smallest eigenvalue of R (gamma^-1 h h^T + I) computed without symmetrizing
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_model(rng, 0.99);
        if (m.eta == 0) continue;
        const Index dim = m.h.size();
        const MatrixXd c = m.R * (m.h * m.h.transpose() / m.gamma + MatrixXd::Identity(dim, dim));
        Eigen::EigenSolver<MatrixXd> es(c);
        const double zeta_min = es.eigenvalues().real().minCoeff();
        CHECK(mean_convergence_rate(m) == doctest::Approx(m.eta / (zeta_min + m.eta)).epsilon(1e-10));
        CHECK(mean_convergence_rate(m) < 1.0);
    }
}

TEST_CASE("RLS bias") {
    const VectorXd h = paper_system();
    CHECK(rls_bias(identity_model(8, h, 0.0, 0.1, 0.99)).isZero());
    const VectorXd b = rls_bias(identity_model(8, h, 0.1, 0.1, 0.99));
    CHECK(b.isApprox(-(0.1 / 1.1) * h, 1e-14));

    const MatrixXd r = gen_covariance(8, 2).R;
    const auto m = TheoryModel::from_noise(r, h, 0.05, 0.05, 0.99);
    const VectorXd expected = -0.05 * oracle::gauss_solve(r + 0.05 * MatrixXd::Identity(8, 8), h);
    CHECK((rls_bias(m) - expected).norm() <= 1e-12);
}

TEST_CASE("noise drive") {
    const VectorXd h = VectorXd::Unit(2, 0);
    CHECK(noise_drive_g(identity_model(2, h, 0.0, 0.0, 0.99)) == 0.0);
    CHECK(noise_drive_g(identity_model(2, h, 0.1, 0.1, 0.99)) == doctest::Approx(0.45).epsilon(1e-14));

    const MatrixXd r = gen_covariance(5, 4).R;
    const auto m = TheoryModel::from_noise(r, VectorXd::Ones(5), 0.0, 0.3, 0.99);
    CHECK(noise_drive_g(m) == doctest::Approx(0.3 * oracle::gauss_inverse(r).trace()).epsilon(1e-12));
}

TEST_CASE("S bar") {
    const auto at_one = identity_model(3, VectorXd::Ones(3), 0.2, 0.2, 1.0);
    CHECK(s_bar(at_one).isApprox(MatrixXd::Identity(3, 3)));
    CHECK(s_bar_spectral_radius(at_one) == doctest::Approx(1.0));

    for (double lambda : {0.5, 0.9, 0.999}) {
        const auto m = identity_model(6, VectorXd::Ones(6), 0.0, 0.1, lambda);
        const double expected = 1 - 2 * lambda + 2 * lambda * lambda + (1 - lambda) * (1 - lambda) * 6;
        CHECK(s_bar_spectral_radius(m) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("stability bound") {
    CHECK(stability_lambda_bound(12.82, 1.8, 0.2, 0.0) == doctest::Approx(0.9202424629127453).epsilon(1e-14));
    CHECK(std::abs(stability_lambda_bound(12.82, 1.8, 0.2, 0.0) - 0.9202) <= 5e-4);
    CHECK_THROWS_AS(stability_lambda_bound(1.0, 0.1, 0.2, 0.0), InvalidModel);
    CHECK_THROWS_AS(stability_lambda_bound(1.0, 1.0, 0.0, 0.0), InvalidModel);

    const MatrixXd r = gen_covariance(8, 2014).R;
    const auto m = TheoryModel::from_noise(r, paper_system(), 0.1, 0.1, 0.99);
    const auto eig = sym_eig(r);
    CHECK(stability_lambda_bound(m) == doctest::Approx(stability_lambda_bound(
                                           oracle::gauss_inverse(r).trace(), eig.eigenvalues.maxCoeff(),
                                           eig.eigenvalues.minCoeff(), 0.1))
                                           .epsilon(1e-12));
}

TEST_CASE("stability bound for R = I") {
    for (int dim : {1, 4, 8})
        for (double eta : {0.0, 0.3, 1.0}) {
            const auto m = identity_model(dim, VectorXd::Ones(dim), eta, eta, 0.99);
            const double expected = 1 - 2 / (dim + (1 - eta) * (1 - eta) + 1);
            CHECK(stability_lambda_bound(m) == doctest::Approx(expected).epsilon(1e-14));
        }
}

TEST_CASE("stability bound rises with eta past the smallest eigenvalue") {
    double previous = stability_lambda_bound(12.82, 1.8, 0.2, 0.2);
    for (int k = 1; k <= 80; ++k) {
        const double eta = 0.2 + 0.01 * k;
        const double bound = stability_lambda_bound(12.82, 1.8, 0.2, eta);
        CHECK(bound > previous);
        previous = bound;
    }
}

TEST_CASE("stability bound lies in (0, 1)") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = random_model(rng, 0.99);
        const double bound = stability_lambda_bound(m);
        CHECK(bound < 1.0);
        CHECK(bound >= -1.0);
    }
}

TEST_CASE("transient MSD") {
    auto m = identity_model(2, VectorXd::Unit(2, 0), 0.0, 0.0, 0.999);
    CHECK(transient_msd(1.0, m) == doctest::Approx(0.998002).epsilon(1e-14));
    const auto curve = transient_msd_curve(m, 10);
    REQUIRE(curve.size() == 10);
    CHECK(curve[9] == doctest::Approx(std::pow(0.998002, 10)).epsilon(1e-12));

    auto at_one = identity_model(2, VectorXd::Ones(2), 0.3, 0.1, 1.0);
    for (double prev : {0.0, 1e-9, 0.7, 12.5}) CHECK(transient_msd(prev, at_one) == prev);
    CHECK_THROWS_AS(transient_msd(-1.0, m), InvalidInput);
}

TEST_CASE("transient MSD settles at the steady state") {
    const auto m = identity_model(8, paper_system(), 0.01, 0.01, 0.9990234375);
    const auto curve = transient_msd_curve(m, 200000);
    CHECK(curve.back() == doctest::Approx(steady_state_msd(m)).epsilon(1e-9));
}

TEST_CASE("steady-state MSD") {
    const auto m = identity_model(8, paper_system(), 0.01, 0.01, 0.9990234375);
    CHECK(steady_state_msd(m) == doctest::Approx(7.904064066471163e-05).epsilon(1e-12));

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const auto model = random_model(rng, 1.0);
        CHECK(steady_state_msd(model) == 0.0);
    }

    // eta -> 0 with xi fixed leaves xi tr{R^-1}
    const MatrixXd r = gen_covariance(4, 8).R;
    const double lambda = 0.99;
    const auto quiet = TheoryModel::from_noise(r, VectorXd::Ones(4), 0.0, 0.2, lambda);
    CHECK(steady_state_msd(quiet) ==
          doctest::Approx((1 - lambda) / (2 * lambda) * 0.2 * oracle::gauss_inverse(r).trace()).epsilon(1e-12));
}

TEST_CASE("asymptotic moments") {
    const MatrixXd r = gen_covariance(3, 5).R;
    const VectorXd h = VectorXd::LinSpaced(3, 1, 3);
    const auto mo = asymptotic_moments(TheoryModel::from_noise(r, h, 0.0, 0.0, 0.5));
    CHECK(mo.phi_bar.isApprox(2 * r));
    CHECK(mo.z_bar.isApprox(2 * r * h));
    CHECK(mo.tau_bar == doctest::Approx(2 * h.dot(r * h)));
    CHECK_THROWS_AS(asymptotic_moments(TheoryModel::from_noise(r, h, 0.1, 0.1, 1.0)), DivergentMoments);
}

TEST_CASE("invalid models") {
    MatrixXd r = MatrixXd::Identity(2, 2);
    r(1, 1) = -0.5;
    CHECK_THROWS_AS(TheoryModel::from_noise(r, VectorXd::Ones(2), 0.1, 0.1, 0.9), InvalidModel);
    CHECK_THROWS_AS(TheoryModel::from_noise(MatrixXd::Identity(2, 2), VectorXd::Ones(3), 0.1, 0.1, 0.9), InvalidModel);
    CHECK_THROWS_AS(TheoryModel::from_noise(MatrixXd::Identity(2, 2), VectorXd::Ones(2), -0.1, 0.1, 0.9), InvalidModel);
    CHECK_THROWS_AS(TheoryModel::from_noise(MatrixXd::Identity(2, 2), VectorXd::Ones(2), 0.1, 0.1, 1.5), InvalidModel);
}
