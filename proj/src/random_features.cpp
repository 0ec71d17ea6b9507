#include "interplab/random_features.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "interplab/activation_analysis.hpp"
#include "interplab/errors.hpp"
#include "interplab/interpolation.hpp"
#include "interplab/polynomial.hpp"
#include "interplab/rng.hpp"

namespace interplab {

FeatureMatrix sample_features(const Dataset& data, const Activation& act,
                              Eigen::Index width, std::uint64_t seed) {
    if (!data.bias_absorbed())
        throw Error(ErrorCode::Precondition,
                    "sample_features needs a bias-absorbed dataset");
    if (width < 1)
        throw Error(ErrorCode::Input, "width must be >= 1");
    const Eigen::Index coords = data.dim();
    const CounterRng rng(seed, "W-init");

    FeatureMatrix fm;
    fm.seed = seed;
    fm.W.resize(width, coords);
    for (Eigen::Index l = 0; l < width; ++l)
        for (Eigen::Index j = 0; j < coords; ++j)
            fm.W(l, j) = rng.normal(static_cast<std::uint64_t>(l),
                                    static_cast<std::uint64_t>(j));
    fm.phi = data.inputs() * fm.W.transpose();
    for (Eigen::Index i = 0; i < fm.phi.rows(); ++i)
        for (Eigen::Index l = 0; l < fm.phi.cols(); ++l)
            fm.phi(i, l) = act(fm.phi(i, l));
    return fm;
}

SigmaTildeEstimate estimate_sigma_tilde(const Dataset& data, const Activation& act,
                                        long long mc_samples, std::uint64_t seed,
                                        std::optional<double> truncation) {
    if (mc_samples < 1000)
        throw Error(ErrorCode::Precondition, "estimator needs >= 1000 Monte-Carlo samples");
    if (truncation && !(*truncation > 0.0))
        throw Error(ErrorCode::Input, "truncation level must be positive");

    const Eigen::Index d = data.count();
    const Eigen::Index coords = data.dim();
    const CounterRng rng(seed, "sigma-tilde");

    // Ten equal-as-possible batches: per-batch minimum eigenvalues feed the
    // standard error; their weighted matrix average is the estimator. Batch
    // sums accumulate in sample order, so results are schedule-independent.
    constexpr int kBatches = 10;
    Eigen::MatrixXd batch_sum[kBatches];
    long long batch_count[kBatches];
    for (int b = 0; b < kBatches; ++b) {
        batch_sum[b] = Eigen::MatrixXd::Zero(d, d);
        batch_count[b] = 0;
    }

    Eigen::VectorXd w(coords), feature(d);
    long long kept = 0;
    for (long long s = 0; s < mc_samples; ++s) {
        const int b = static_cast<int>((s * kBatches) / mc_samples);
        ++batch_count[b];
        for (Eigen::Index j = 0; j < coords; ++j)
            w[j] = rng.normal(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(j));
        feature = data.inputs() * w;
        for (Eigen::Index i = 0; i < d; ++i)
            feature[i] = act(feature[i]);
        if (truncation && !(feature.norm() < *truncation))
            continue; // zeroed term: counted in the average, not the sum
        ++kept;
        batch_sum[b].selfadjointView<Eigen::Lower>().rankUpdate(feature, 1.0);
    }

    SigmaTildeEstimate estimate;
    estimate.truncation = truncation;
    estimate.mc_samples = mc_samples;
    estimate.kept_samples = truncation ? kept : mc_samples;

    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(d, d);
    double lambda_batch[kBatches];
    for (int b = 0; b < kBatches; ++b) {
        total += batch_sum[b];
        const Eigen::MatrixXd batch_mean =
            Eigen::MatrixXd(batch_sum[b].selfadjointView<Eigen::Lower>()) /
            static_cast<double>(batch_count[b]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(batch_mean);
        lambda_batch[b] = eig.eigenvalues()(0);
    }
    estimate.sigma = Eigen::MatrixXd(total.selfadjointView<Eigen::Lower>()) /
                     static_cast<double>(mc_samples);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(estimate.sigma);
    estimate.lambda_min = eig.eigenvalues()(0);

    double mean = 0.0;
    for (double lb : lambda_batch)
        mean += lb;
    mean /= kBatches;
    double var = 0.0;
    for (double lb : lambda_batch)
        var += (lb - mean) * (lb - mean);
    var /= (kBatches - 1);
    estimate.lambda_min_stderr = std::sqrt(var / kBatches);
    return estimate;
}

double chernoff_base(double delta) {
    if (!(delta >= 0.0) || !(delta < 1.0))
        throw Error(ErrorCode::Input, "delta must lie in [0, 1)");
    // log base = -delta - (1-delta) log(1-delta); exact at delta = 0.
    const double log_base = -delta - (1.0 - delta) * std::log1p(-delta);
    return std::exp(log_base);
}

double log_chernoff_failure_bound(Eigen::Index d, double width, double lambda_min,
                                  double truncation_level, double delta) {
    if (!(delta >= 0.0) || !(delta < 1.0))
        throw Error(ErrorCode::Input, "delta must lie in [0, 1)");
    if (!(lambda_min > 0.0) || !(truncation_level > 0.0))
        throw Error(ErrorCode::Precondition,
                    "lambda_min and truncation level must be positive");
    if (d < 1 || !(width >= 0.0))
        throw Error(ErrorCode::Input, "d >= 1 and width >= 0 required");
    const double log_base = -delta - (1.0 - delta) * std::log1p(-delta);
    return std::log(static_cast<double>(d)) +
           width * lambda_min / (truncation_level * truncation_level) * log_base;
}

double chernoff_failure_bound(Eigen::Index d, double width, double lambda_min,
                              double truncation_level, double delta) {
    return std::exp(log_chernoff_failure_bound(d, width, lambda_min, truncation_level, delta));
}

WidthCertificate recommend_width(const Dataset& data, const Activation& act,
                                 double target_failure_prob, long long mc_samples,
                                 std::uint64_t seed, const WidthOptions& options) {
    if (!(target_failure_prob > 0.0) || !(target_failure_prob < 1.0))
        throw Error(ErrorCode::Input, "target failure probability must lie in (0, 1)");

    const Dataset absorbed = data.with_bias_absorbed();
    const Eigen::Index d = absorbed.count();

    double M;
    if (options.M_override) {
        M = *options.M_override;
        if (!(M > 0.0))
            throw Error(ErrorCode::Input, "range bound M must be positive");
    } else {
        M = 4.0 * absorbed.inputs().rowwise().norm().maxCoeff() + std::abs(options.b0);
    }

    // Bounded activations use the generic truncation level sqrt(d)(sup+1);
    // polynomial activations (unbounded compositions included) use the
    // polynomial-case level |act(0)| sqrt(d) + 1.
    double T_d;
    if (act.is_polynomial())
        T_d = std::abs(act(0.0)) * std::sqrt(static_cast<double>(d)) + 1.0;
    else
        T_d = truncation_level(act, static_cast<int>(d), M);

    const SigmaTildeEstimate estimate =
        estimate_sigma_tilde(absorbed, act, mc_samples, seed, T_d);
    if (!(estimate.lambda_min > 3.0 * estimate.lambda_min_stderr))
        throw Error(ErrorCode::InfeasibleEstimate,
                    "truncated lambda estimate " + std::to_string(estimate.lambda_min) +
                        " is not positive beyond 3 standard errors (stderr " +
                        std::to_string(estimate.lambda_min_stderr) + ")");

    WidthCertificate cert;
    cert.lambda_tilde_est = estimate.lambda_min;
    cert.lambda_tilde_stderr = estimate.lambda_min_stderr;
    cert.mc_samples = mc_samples;
    cert.T_d = T_d;
    cert.M = M;
    cert.delta = options.delta;
    cert.chernoff_base = chernoff_base(options.delta);
    cert.target_failure_prob = target_failure_prob;

    // Smallest integer width with log-bound <= log(target); the closed-form
    // ceil is then nudged to exact integer semantics.
    const double log_target = std::log(target_failure_prob);
    const double rate = estimate.lambda_min / (T_d * T_d) * std::log(cert.chernoff_base);
    long long h = 1;
    if (rate < 0.0) {
        const double exact = (log_target - std::log(static_cast<double>(d))) / rate;
        h = std::max<long long>(1, static_cast<long long>(std::ceil(exact)));
        while (h > 1 &&
               log_chernoff_failure_bound(d, static_cast<double>(h - 1), estimate.lambda_min,
                                          T_d, options.delta) <= log_target)
            --h;
        while (log_chernoff_failure_bound(d, static_cast<double>(h), estimate.lambda_min, T_d,
                                          options.delta) > log_target)
            ++h;
    }
    cert.recommended_h = h;
    return cert;
}

namespace {

Eigen::Index rank_from_singular_values(const Eigen::VectorXd& sv, Eigen::Index d,
                                       double factor) {
    const double tol = factor * static_cast<double>(d) *
                       std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol)
            ++rank;
    return rank;
}

} // namespace

OutputFit fit_output_weights(const FeatureMatrix& features, const Eigen::VectorXd& y,
                             double rank_tol_factor) {
    const Eigen::MatrixXd& phi = features.phi;
    const Eigen::Index d = phi.rows();
    const Eigen::Index h = phi.cols();
    if (y.size() != d)
        throw Error(ErrorCode::Input, "target length must match the point count");

    OutputFit fit;
    if (h >= d) {
        // QR of phi^T (tall), then SVD of the small R factor: avoids forming
        // the Gram matrix, keeps the minimum-norm property exactly.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(phi.transpose());
        const Eigen::MatrixXd thin_q =
            qr.householderQ() * Eigen::MatrixXd::Identity(h, d);
        const Eigen::MatrixXd r =
            qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        fit.rank = rank_from_singular_values(sv, d, rank_tol_factor);
        // phi = R^T Q^T, so solve min ||R^T z - y|| and lift v = Q z; with
        // R = U S V^T, pinv(R^T) = U S^+ V^T.
        Eigen::VectorXd z = svd.matrixV().transpose() * y;
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z[i] = (i < fit.rank) ? z[i] / sv(i) : 0.0;
        z = svd.matrixU() * z;
        fit.weights = thin_q * z;
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& sv = svd.singularValues();
        fit.rank = rank_from_singular_values(sv, d, rank_tol_factor);
        Eigen::VectorXd z = svd.matrixU().transpose() * y;
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z[i] = (i < fit.rank) ? z[i] / sv(i) : 0.0;
        fit.weights = svd.matrixV() * z;
    }
    fit.residual_norm = (phi * fit.weights - y).norm();
    return fit;
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& phi, double rank_tol_factor) {
    const Eigen::Index d = phi.rows();
    const Eigen::Index h = phi.cols();
    if (h >= d) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(phi.transpose());
        const Eigen::MatrixXd r =
            qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
        return rank_from_singular_values(svd.singularValues(), d, rank_tol_factor);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi);
    return rank_from_singular_values(svd.singularValues(), d, rank_tol_factor);
}

DeepPipelineResult deep_poly_pipeline(const Dataset& data, const Activation& act,
                                      Eigen::Index width, std::uint64_t seed) {
    if (!act.is_polynomial() || act.poly_degree() < 2)
        throw Error(ErrorCode::Precondition,
                    "pipeline needs a polynomial activation of degree >= 2");
    const int depth = required_depth(act.poly_degree(), static_cast<int>(data.count()));

    std::vector<double> composed = act.poly_coeffs();
    for (int layer = 2; layer < depth; ++layer)
        composed = poly::compose(act.poly_coeffs(), composed);

    DeepPipelineResult result;
    result.depth = depth;
    result.composed_coeffs = composed;
    const Dataset absorbed = data.with_bias_absorbed();
    result.features =
        sample_features(absorbed, Activation::polynomial(composed), width, seed);
    result.fit = fit_output_weights(result.features, data.target_column(0));
    return result;
}

} // namespace interplab
