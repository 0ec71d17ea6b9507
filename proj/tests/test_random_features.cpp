#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "interplab/activation.hpp"
#include "interplab/dataset.hpp"
#include "interplab/errors.hpp"
#include "interplab/polynomial.hpp"
#include "interplab/random_features.hpp"
#include "interplab/rng.hpp"

using namespace interplab;

namespace {

Dataset absorbed_dataset(std::mt19937_64& gen, Eigen::Index d, Eigen::Index p) {
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::MatrixXd inputs = Eigen::MatrixXd::NullaryExpr(d, p, [&] { return box(gen); });
    Eigen::MatrixXd targets = Eigen::MatrixXd::NullaryExpr(d, 1, [&] { return unit(gen); });
    return Dataset(inputs, targets).with_bias_absorbed();
}

} // namespace

TEST_CASE("counter generator is a pure function of seed, stream, and counter") {
    const CounterRng a(42, "ab-sampling");
    const CounterRng b(42, "ab-sampling");
    const CounterRng other_stream(42, "W-init");
    const CounterRng other_seed(43, "ab-sampling");

    int stream_differs = 0, seed_differs = 0;
    for (std::uint64_t c = 0; c < 64; ++c) {
        CHECK(a.block(c, 7) == b.block(c, 7));
        stream_differs += a.block(c, 7) != other_stream.block(c, 7);
        seed_differs += a.block(c, 7) != other_seed.block(c, 7);
    }
    CHECK(stream_differs == 64);
    CHECK(seed_differs == 64);
}

TEST_CASE("counter uniforms live in their interval") {
    const CounterRng rng(7, "sep-dir");
    for (std::uint64_t c = 0; c < 4096; ++c) {
        const double u = rng.uniform(c, 0);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = rng.uniform_in(-3.0, 5.0, c, 1);
        CHECK(v >= -3.0);
        CHECK(v < 5.0);
    }
}

TEST_CASE("counter normals have standard moments") {
    const CounterRng rng(11, "sigma-tilde");
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int c = 0; c < n; ++c) {
        const double z = rng.normal(static_cast<std::uint64_t>(c), 0);
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("feature sampling is deterministic and prefix-stable in the width") {
    std::mt19937_64 gen(5);
    const Dataset data = absorbed_dataset(gen, 6, 3);
    const Activation act = Activation::tanh_act();

    const FeatureMatrix narrow = sample_features(data, act, 8, 99);
    const FeatureMatrix again = sample_features(data, act, 8, 99);
    CHECK(narrow.W == again.W);
    CHECK(narrow.phi == again.phi);

    const FeatureMatrix wide = sample_features(data, act, 16, 99);
    CHECK(wide.W.topRows(8) == narrow.W);
    CHECK(wide.phi.leftCols(8) == narrow.phi);
    CHECK(wide.W.rows() == 16);
    CHECK(wide.W.cols() == data.dim());
    CHECK(wide.phi.rows() == 6);
}

TEST_CASE("feature sampling requires the bias coordinate to be absorbed") {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    Eigen::MatrixXd inputs = Eigen::MatrixXd::NullaryExpr(3, 2, [&] { return box(gen); });
    const Dataset raw(inputs, Eigen::MatrixXd::Zero(3, 1));
    try {
        sample_features(raw, Activation::tanh_act(), 4, 1);
        REQUIRE(false);
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::Precondition);
    }
}

TEST_CASE("a constant activation yields a rank-one feature matrix") {
    std::mt19937_64 gen(8);
    const Dataset data = absorbed_dataset(gen, 5, 2);
    const FeatureMatrix features =
        sample_features(data, Activation::polynomial({3.0}), 12, 4);
    CHECK(numerical_rank(features.phi) <= 1);
}

TEST_CASE("tiny identity system estimates a unit eigenvalue") {
    // One sample x = 1: the moment matrix of w -> w is E[w^2] = 1.
    Eigen::MatrixXd inputs(1, 1), targets(1, 1);
    inputs << 1.0;
    targets << 0.5;
    const Dataset data(inputs, targets);
    const SigmaTildeEstimate est =
        estimate_sigma_tilde(data, Activation::polynomial({0.0, 1.0}), 20000, 3);
    CHECK(est.mc_samples == 20000);
    CHECK(est.kept_samples == 20000);
    CHECK(std::abs(est.lambda_min - 1.0) <=
          std::max(4.0 * est.lambda_min_stderr, 0.05));
}

TEST_CASE("duplicated rows collapse the estimated minimum eigenvalue") {
    Eigen::MatrixXd inputs(2, 2), targets(2, 1);
    inputs << 0.5, -1.0, 0.5, -1.0;
    targets << 0.0, 1.0;
    const Dataset data(inputs, targets, Dataset::AllowDuplicates{});
    const SigmaTildeEstimate est =
        estimate_sigma_tilde(data, Activation::tanh_act(), 4000, 12);
    CHECK(std::abs(est.lambda_min) <= 1e-10);
}

TEST_CASE("distinct rows give a positive certified eigenvalue") {
    std::mt19937_64 gen(21);
    const Dataset data = absorbed_dataset(gen, 3, 2);
    const SigmaTildeEstimate est =
        estimate_sigma_tilde(data, Activation::tanh_act(), 8000, 5);
    CHECK(est.lambda_min > 3.0 * est.lambda_min_stderr);
    CHECK(est.lambda_min_stderr > 0.0);
    CHECK(est.sigma.rows() == 3);
    CHECK(est.sigma.isApprox(est.sigma.transpose(), 1e-12));
}

TEST_CASE("truncation can only lower the estimate, and sample size tightens it") {
    std::mt19937_64 gen(33);
    const Dataset data = absorbed_dataset(gen, 4, 2);
    const Activation act = Activation::tanh_act();

    const SigmaTildeEstimate plain = estimate_sigma_tilde(data, act, 6000, 9);
    const SigmaTildeEstimate truncated =
        estimate_sigma_tilde(data, act, 6000, 9, 2.5);
    CHECK(truncated.truncation.has_value());
    CHECK(truncated.kept_samples <= truncated.mc_samples);
    // Same seed, same draws: zeroing terms moves the average down in the
    // positive-semidefinite order, so the minimum eigenvalue cannot rise.
    CHECK(truncated.lambda_min <= plain.lambda_min + 1e-12);

    const SigmaTildeEstimate more = estimate_sigma_tilde(data, act, 24000, 9);
    CHECK(std::abs(more.lambda_min - plain.lambda_min) <=
          6.0 * (more.lambda_min_stderr + plain.lambda_min_stderr) + 0.02);
}

TEST_CASE("monte carlo budgets below the floor are rejected") {
    std::mt19937_64 gen(2);
    const Dataset data = absorbed_dataset(gen, 3, 1);
    try {
        estimate_sigma_tilde(data, Activation::tanh_act(), 999, 0);
        REQUIRE(false);
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::Precondition);
    }
}

TEST_CASE("chernoff base matches the closed form at one half") {
    // e^(-1/2) / (1/2)^(1/2) = e^(-1/2) * sqrt(2)
    const double oracle = std::exp(-0.5) * std::sqrt(2.0);
    CHECK(chernoff_base(0.5) == doctest::Approx(oracle).epsilon(1e-15));
    CHECK(chernoff_base(0.5) < 1.0);
    CHECK(chernoff_base(0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(chernoff_base(1.0), Error);
    CHECK_THROWS_AS(chernoff_base(-0.1), Error);
    CHECK_THROWS_AS(chernoff_base(1.5), Error);
}

TEST_CASE("the failure bound is exponential in the width") {
    const double lambda = 0.2, T = 3.0, delta = 0.5;
    const Eigen::Index d = 6;
    CHECK(chernoff_failure_bound(d, 0.0, lambda, T, delta) == doctest::Approx(6.0));
    const double log_d = log_chernoff_failure_bound(d, 0.0, lambda, T, delta);
    CHECK(log_d == doctest::Approx(std::log(6.0)).epsilon(1e-14));

    for (double h : {8.0, 64.0, 512.0, 4096.0}) {
        const double lg_h = log_chernoff_failure_bound(d, h, lambda, T, delta);
        const double lg_2h = log_chernoff_failure_bound(d, 2 * h, lambda, T, delta);
        // log bound is affine in h: f(2h) - 2 f(h) + f(0) = 0.
        CHECK(std::abs(lg_2h - 2.0 * lg_h + log_d) <= 1e-12 * (1.0 + std::abs(lg_2h)));
        CHECK(lg_2h < lg_h); // strictly decreasing
    }

    // Huge widths underflow the plain bound but stay finite in log space.
    const double tiny = log_chernoff_failure_bound(d, 1e7, lambda, T, delta);
    CHECK(std::isfinite(tiny));
    CHECK(tiny < -1e4);
    CHECK(chernoff_failure_bound(d, 1e7, lambda, T, delta) == 0.0);
}

TEST_CASE("recommended widths invert the bound tightly") {
    std::mt19937_64 gen(17);
    const Dataset data = absorbed_dataset(gen, 5, 3);
    const double target = 1e-6;
    const WidthCertificate cert =
        recommend_width(data, Activation::tanh_act(), target, 4000, 11);

    CHECK(cert.recommended_h >= 1);
    CHECK(cert.lambda_tilde_est > 3.0 * cert.lambda_tilde_stderr);
    CHECK(cert.T_d > 0.0);
    CHECK(cert.M > 0.0);
    CHECK(cert.delta == 0.5);
    CHECK(cert.chernoff_base == doctest::Approx(std::exp(-0.5) * std::sqrt(2.0)));
    CHECK(cert.target_failure_prob == target);

    const double at_h = log_chernoff_failure_bound(
        5, double(cert.recommended_h), cert.lambda_tilde_est, cert.T_d, cert.delta);
    const double below_h = log_chernoff_failure_bound(
        5, double(cert.recommended_h - 1), cert.lambda_tilde_est, cert.T_d, cert.delta);
    CHECK(at_h <= std::log(target) + 1e-9);
    CHECK(below_h > std::log(target) - 1e-9);

    // A looser target never asks for more width.
    const WidthCertificate loose =
        recommend_width(data, Activation::tanh_act(), 1e-3, 4000, 11);
    CHECK(loose.recommended_h <= cert.recommended_h);
}

TEST_CASE("width recommendation refuses an uncertifiable estimate") {
    Eigen::MatrixXd inputs(2, 2), targets(2, 1);
    inputs << 1.0, 1.0, 1.0, 1.0;
    targets << 0.0, 1.0;
    const Dataset data(inputs, targets, Dataset::AllowDuplicates{});
    try {
        recommend_width(data, Activation::tanh_act(), 1e-6, 2000, 1);
        REQUIRE(false);
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::InfeasibleEstimate);
        CHECK_FALSE(error_code_is_usage(err.code()));
    }
}

TEST_CASE("a single point is certified with minimal machinery") {
    Eigen::MatrixXd inputs(1, 2), targets(1, 1);
    inputs << 0.3, 1.0;
    targets << 0.9;
    const Dataset data(inputs, targets);
    const WidthCertificate cert =
        recommend_width(data, Activation::tanh_act(), 1e-4, 2000, 8);
    CHECK(cert.recommended_h >= 1);
}

TEST_CASE("fitting against an identity feature matrix copies the targets") {
    FeatureMatrix features;
    features.phi = Eigen::MatrixXd::Identity(4, 4);
    features.W = Eigen::MatrixXd::Zero(4, 2);
    Eigen::VectorXd y(4);
    y << 1.0, -2.0, 0.25, 3.0;
    const OutputFit fit = fit_output_weights(features, y);
    CHECK((fit.weights - y).norm() <= 1e-12);
    CHECK(fit.rank == 4);
    CHECK(fit.residual_norm <= 1e-12);

    const OutputFit zero = fit_output_weights(features, Eigen::VectorXd::Zero(4));
    CHECK(zero.weights.norm() <= 1e-14);
}

TEST_CASE("overparametrized fits match the closed-form minimum-norm solution") {
    std::mt19937_64 gen(40);
    const Dataset data = absorbed_dataset(gen, 8, 3);
    const FeatureMatrix features = sample_features(data, Activation::tanh_act(), 32, 6);
    REQUIRE(numerical_rank(features.phi) == 8);

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(8, [&] { return unit(gen); });
    const OutputFit fit = fit_output_weights(features, y);
    CHECK(fit.rank == 8);
    CHECK(fit.residual_norm <= 1e-8 * y.norm());
    CHECK((features.phi * fit.weights - y).norm() <= 1e-8 * y.norm());

    // Full-rank oracle: v = phi^T (phi phi^T)^{-1} y is the unique
    // minimum-norm interpolating weight vector.
    const Eigen::MatrixXd gram = features.phi * features.phi.transpose();
    const Eigen::VectorXd oracle = features.phi.transpose() * gram.ldlt().solve(y);
    CHECK((fit.weights - oracle).norm() <= 1e-6 * (1.0 + oracle.norm()));

    // Adding any null-space component keeps the fit but raises the norm.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(features.phi,
                                       Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(32 - 8);
    const Eigen::VectorXd drift =
        null_basis * Eigen::VectorXd::NullaryExpr(32 - 8, [&] { return unit(gen); });
    CHECK((features.phi * drift).norm() <= 1e-10);
    CHECK((fit.weights + drift).norm() >= fit.weights.norm() - 1e-12);
}

TEST_CASE("rank-deficient fits report the shortfall honestly") {
    FeatureMatrix features;
    features.phi.resize(3, 5);
    features.phi.row(0) << 1.0, 2.0, 0.0, -1.0, 0.5;
    features.phi.row(1) << 1.0, 2.0, 0.0, -1.0, 0.5;
    features.phi.row(2) << 0.0, 1.0, 1.0, 0.0, -2.0;
    features.W = Eigen::MatrixXd::Zero(5, 2);
    Eigen::VectorXd y(3);
    y << 0.0, 1.0, 0.0;
    const OutputFit fit = fit_output_weights(features, y);
    CHECK(fit.rank == 2);
    CHECK(fit.residual_norm >= 0.5);
    CHECK(fit.residual_norm ==
          doctest::Approx((features.phi * fit.weights - y).norm()).epsilon(1e-10));
}

TEST_CASE("the deep pipeline composes polynomial activations to the right degree") {
    std::mt19937_64 gen(55);
    const Dataset data = absorbed_dataset(gen, 6, 2);
    const Activation square = Activation::polynomial({0.0, 0.0, 1.0});

    const DeepPipelineResult result = deep_poly_pipeline(data, square, 48, 14);
    CHECK(result.depth == 4); // smallest l with 2^(l-1) > 4
    CHECK(poly::degree(result.composed_coeffs) == 8);
    CHECK(result.features.phi.cols() == 48);

    // The feature matrix must actually be the composed map applied to the
    // random pre-activations.
    const Eigen::MatrixXd pre = data.inputs() * result.features.W.transpose();
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 5; ++j)
            CHECK(result.features.phi(i, j) ==
                  doctest::Approx(poly::eval(result.composed_coeffs, pre(i, j)))
                      .epsilon(1e-9));
}

TEST_CASE("high-degree activations skip composition entirely") {
    std::mt19937_64 gen(56);
    const Dataset data = absorbed_dataset(gen, 4, 2);
    const Activation cubic = Activation::polynomial({0.0, 1.0, 0.0, 0.5});
    const DeepPipelineResult result = deep_poly_pipeline(data, cubic, 24, 7);
    CHECK(result.depth == 2);
    REQUIRE(result.composed_coeffs.size() == 4);
    CHECK(result.composed_coeffs[3] == doctest::Approx(0.5));
}

TEST_CASE("the deep pipeline can reach interpolating fits at modest width") {
    std::mt19937_64 gen(57);
    const Dataset data = absorbed_dataset(gen, 5, 2);
    const Activation square = Activation::polynomial({0.0, 0.0, 1.0});
    int usable = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DeepPipelineResult result = deep_poly_pipeline(data, square, 64, seed);
        if (result.fit.rank == 5 &&
            result.fit.residual_norm <= 1e-6 * (1.0 + data.target_column(0).norm()))
            ++usable;
    }
    CHECK(usable >= 3);
}

TEST_CASE("the deep pipeline rejects non-polynomial activations") {
    std::mt19937_64 gen(58);
    const Dataset data = absorbed_dataset(gen, 4, 1);
    CHECK_THROWS_AS(deep_poly_pipeline(data, Activation::tanh_act(), 16, 0), Error);
}
