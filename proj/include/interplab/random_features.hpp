#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "interplab/activation.hpp"
#include "interplab/dataset.hpp"

namespace interplab {

// Random hidden layer: phi = act(X W^T) with W i.i.d. standard normal.
// Entry (l, j) of W depends only on (seed, l, j), so growing the width
// extends phi by new columns without touching existing ones.
struct FeatureMatrix {
    Eigen::MatrixXd phi; // d x h
    Eigen::MatrixXd W;   // h x (p+1), bias coordinate absorbed
    std::uint64_t seed = 0;
};

// Requires data.bias_absorbed() == true (append the constant coordinate
// first; the bias of each hidden node rides inside W).
FeatureMatrix sample_features(const Dataset& data, const Activation& act,
                              Eigen::Index width, std::uint64_t seed);

// Monte-Carlo estimate of E_w[act(Xw) act(Xw)^T] over standard normal w,
// optionally zeroing draws with ||act(Xw)|| >= truncation. Uses the rows of
// X exactly as given.
struct SigmaTildeEstimate {
    Eigen::MatrixXd sigma; // d x d
    double lambda_min = 0.0;
    double lambda_min_stderr = 0.0; // 10-fold batch estimate
    std::optional<double> truncation;
    long long mc_samples = 0;
    long long kept_samples = 0;
};

SigmaTildeEstimate estimate_sigma_tilde(const Dataset& data, const Activation& act,
                                        long long mc_samples, std::uint64_t seed,
                                        std::optional<double> truncation = std::nullopt);

// Matrix Chernoff machinery: base = e^(-delta) / (1-delta)^(1-delta); the
// failure bound is d * base^(h * lambda_min / T^2). Log-space variants avoid
// underflow for large widths.
double chernoff_base(double delta);
double log_chernoff_failure_bound(Eigen::Index d, double width, double lambda_min,
                                  double truncation_level, double delta);
double chernoff_failure_bound(Eigen::Index d, double width, double lambda_min,
                              double truncation_level, double delta);

struct WidthCertificate {
    double lambda_tilde_est = 0.0; // truncated-estimator minimum eigenvalue
    double lambda_tilde_stderr = 0.0;
    long long mc_samples = 0;
    double T_d = 0.0;
    double M = 0.0; // activation range bound behind T_d
    double delta = 0.5;
    double chernoff_base = 0.0;
    long long recommended_h = 0;
    double target_failure_prob = 0.0;
};

struct WidthOptions {
    double delta = 0.5;
    // Shift from a derivative certificate; enlarges the range bound M so the
    // smoothing window around -b0 stays covered. Zero when not applicable.
    double b0 = 0.0;
    std::optional<double> M_override;
};

// Inverts the Chernoff bound for the smallest width whose failure bound is
// at or below the target. Throws InfeasibleEstimate when the truncated
// lambda estimate is not positive beyond 3 standard errors.
WidthCertificate recommend_width(const Dataset& data, const Activation& act,
                                 double target_failure_prob, long long mc_samples,
                                 std::uint64_t seed, const WidthOptions& options = {});

// Minimum-norm least squares against the feature matrix; rank decided at
// tolerance d * machine-eps * sigma_max.
struct OutputFit {
    Eigen::VectorXd weights; // h-vector
    double residual_norm = 0.0;
    Eigen::Index rank = 0;
};

OutputFit fit_output_weights(const FeatureMatrix& features, const Eigen::VectorXd& y,
                             double rank_tol_factor = 1.0);

// Row-space numerical rank of a d x h feature matrix at the same tolerance.
Eigen::Index numerical_rank(const Eigen::MatrixXd& phi, double rank_tol_factor = 1.0);

// Depth-then-regress pipeline for polynomial activations: composes the
// activation required_depth(m, d) - 1 times, applies it entrywise to the
// random pre-activations, and fits the first target column.
struct DeepPipelineResult {
    int depth = 0;
    std::vector<double> composed_coeffs;
    FeatureMatrix features;
    OutputFit fit;
};

DeepPipelineResult deep_poly_pipeline(const Dataset& data, const Activation& act,
                                      Eigen::Index width, std::uint64_t seed);

} // namespace interplab
