#include <doctest.h>

#include <random>
#include <vector>

#include "dcdrtls/stats.hpp"
#include "oracles.hpp"

using namespace dcdrtls;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using FF = ForgettingFactor<double>;

TEST_CASE("init_stats") {
    const auto s = init_stats<double>(2, FF::from_value(0.999), 0.01);
    CHECK(s.phi == 0.01 * MatrixXd::Identity(2, 2));
    CHECK(s.z.isZero());
    CHECK(s.tau == 0.0);
    CHECK(s.n == 0);
    CHECK_THROWS_AS(init_stats<double>(2, FF::from_value(0.999), 0.0), ConfigError);
    CHECK_THROWS_AS(init_stats<double>(0, FF::from_value(0.999), 0.1), ConfigError);
    CHECK_THROWS_AS(FF::from_value(0.0), ConfigError);
    CHECK_THROWS_AS(FF::from_value(1.5), ConfigError);
    CHECK_THROWS_AS(FF::from_exponent(0), ConfigError);
    CHECK(FF::from_exponent(10).value() == 0.9990234375);
}

TEST_CASE("single rank-one update") {
    auto s = init_stats<double>(3, FF::from_value(1.0), 0.5);
    update_generic(s, VectorXd::Unit(3, 0), 1.0);
    MatrixXd expected = 0.5 * MatrixXd::Identity(3, 3);
    expected(0, 0) += 1.0;
    CHECK(s.phi_full() == expected);
    CHECK(s.z == VectorXd::Unit(3, 0));
    CHECK(s.tau == 1.0);
    CHECK(s.n == 1);
}

TEST_CASE("pure decay") {
    auto s = init_stats<double>(3, FF::from_value(0.9), 2.0);
    for (int i = 0; i < 20; ++i) update_generic(s, VectorXd::Zero(3), 0.0);
    CHECK(s.phi_full().isApprox(std::pow(0.9, 20) * 2.0 * MatrixXd::Identity(3, 3), 1e-14));
}

TEST_CASE("generic update matches the weighted batch sum") {
    std::mt19937_64 rng(31);
    for (double lambda : {0.9, 0.999, 1.0}) {
        auto s = init_stats<double>(5, FF::from_value(lambda), 0.01);
        std::vector<VectorXd> xs;
        double tau = 0;
        VectorXd z = VectorXd::Zero(5);
        for (int n = 0; n < 50; ++n) {
            xs.push_back(oracle::random_vector(5, rng));
            const double y = oracle::random_vector(1, rng)(0);
            update_generic(s, xs.back(), y);
            z = lambda * z + y * xs.back();
            tau = lambda * tau + y * y;
        }
        CHECK((s.phi_full() - oracle::weighted_phi(xs, lambda, 0.01)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((s.z - z).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(s.tau == doctest::Approx(tau).epsilon(1e-12));
    }
}

TEST_CASE("shift-and-add forgetting is bit-identical to the product") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> mag(-1e3, 1e3);
    for (int p : {1, 4, 10, 20, 52}) {
        const auto ff = FF::from_exponent(p);
        for (int i = 0; i < 1000; ++i) {
            const double a = mag(rng);
            OpCounts ops;
            CHECK(ff.scale(a, ops) == ff.value() * a);
            CHECK(ops.add == 1);
            CHECK(ops.mul == 0);
        }
    }
    OpCounts ops;
    FF::from_value(0.99).scale(2.0, ops);
    CHECK(ops.mul == 1);
}

TEST_CASE("update_shift for L = 1 is the scalar recursion") {
    auto s = init_stats<double>(1, FF::from_value(0.9), 1.0);
    double phi = 1.0;
    for (double x : {0.3, -1.2, 2.0, 0.1}) {
        update_shift(s, x, (VectorXd(1) << x).finished(), 0.5);
        phi = 0.9 * phi + x * x;
        CHECK(s.phi(0, 0) == doctest::Approx(phi).epsilon(1e-15));
    }
}

TEST_CASE("update_shift equals update_generic on pre-windowed streams") {
    std::mt19937_64 rng(77);
    for (int dim : {1, 2, 8, 16}) {
        for (auto lambda : {FF::from_exponent(10), FF::from_value(0.97)}) {
            auto shifted = init_stats_prewindowed<double>(dim, lambda, 0.01);
            auto generic = init_stats_prewindowed<double>(dim, lambda, 0.01);
            VectorXd window = VectorXd::Zero(dim);
            for (int n = 0; n < 100; ++n) {
                const double x = oracle::random_vector(1, rng)(0);
                for (Index i = dim - 1; i > 0; --i) window(i) = window(i - 1);
                window(0) = x;
                const double y = oracle::random_vector(1, rng)(0);
                update_shift(shifted, x, window, y);
                update_generic(generic, window, y);
            }
            const MatrixXd diff = shifted.phi.triangularView<Eigen::Upper>().toDenseMatrix() -
                                  generic.phi.triangularView<Eigen::Upper>().toDenseMatrix();
            CHECK(diff.cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(shifted.z == generic.z);
            CHECK(shifted.tau == generic.tau);
        }
    }
}

TEST_CASE("update operation counts") {
    const Index dim = 8;
    auto s = init_stats<double>(dim, FF::from_exponent(10), 0.01);
    StatsOps ops;
    update_generic(s, VectorXd::Ones(dim), 1.0, &ops);
    CHECK(ops.phi.mul == 36);
    CHECK(ops.phi.add == 72);
    CHECK(ops.cross == OpCounts{8, 16, 0, 0});
    CHECK(ops.energy == OpCounts{1, 2, 0, 0});

    StatsOps shift_ops;
    update_shift(s, 1.0, VectorXd::Ones(dim), 1.0, &shift_ops);
    CHECK(shift_ops.phi == OpCounts{8, 16, 0, 0});
}

TEST_CASE("update errors") {
    auto s = init_stats<double>(3, FF::from_value(0.9), 1.0);
    CHECK_THROWS_AS(update_generic(s, VectorXd::Ones(2), 0.0), InvalidInput);
    VectorXd nan = VectorXd::Ones(3);
    nan(1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(update_generic(s, nan, 0.0), InvalidInput);
    CHECK_THROWS_AS(update_shift(s, 2.0, VectorXd::Ones(3), 0.0), InvalidInput);
}

TEST_CASE("assemble_psi") {
    auto s = init_stats<double>(2, FF::from_value(0.9), 1.0);
    auto aug = assemble_psi(s, 3.0);
    MatrixXd expected = MatrixXd::Identity(3, 3);
    expected(2, 2) = 0;
    CHECK(aug.psi == expected);

    std::mt19937_64 rng(2);
    for (int n = 0; n < 10; ++n) update_generic(s, oracle::random_vector(2, rng), 0.7);
    aug = assemble_psi(s, 1.0);
    CHECK(aug.psi.col(2).head(2) == s.z);
    CHECK(aug.psi.row(2).head(2) == s.z.transpose());
    CHECK(aug.psi(2, 2) == s.tau);
    CHECK(aug.psi.topLeftCorner(2, 2) == s.phi_full());

    aug = assemble_psi(s, 4.0);
    CHECK(aug.psi.col(2).head(2).isApprox(0.5 * s.z));
    CHECK(aug.psi(2, 2) == doctest::Approx(s.tau / 4));
    CHECK_THROWS_AS(assemble_psi(s, 0.0), ConfigError);
    CHECK_THROWS_AS(assemble_psi(s, -1.0), ConfigError);
}
