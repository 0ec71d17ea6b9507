#pragma once

#include <cstdint>
#include <vector>

#include "interplab/activation.hpp"
#include "interplab/dataset.hpp"
#include "interplab/network.hpp"

namespace interplab {

// Projection of the inputs onto a direction that keeps all points separated.
struct SeparatingDirection {
    Eigen::VectorXd w;           // unit vector, length p
    Eigen::VectorXd projections; // t_i = w . x_i, dataset order
    double min_gap = 0.0;        // min over pairs |t_i - t_j|; +inf when d = 1
};

// Samples up to 64 directions from the unit sphere and returns the one with
// the largest minimum pairwise projection gap.
SeparatingDirection find_separating_direction(const Dataset& data, std::uint64_t seed);

struct InterpolationOptions {
    double interp_tol = 1e-6;
    int max_rounds = 256;
    // Strict acceptance: condition of the equilibrated node system below
    // 1/sqrt(machine epsilon).
    double cond_accept = 67108864.0;
    // Fallback acceptance after the round budget: best-conditioned round up
    // to this bound, kept only if the refined solve meets interp_tol.
    double cond_fallback = 1e10;
};

// Diagnostics from a successful construction.
struct ShallowBuildInfo {
    double condition = 0.0; // equilibrated system condition of accepted round
    int rounds_used = 0;
    double max_residual = 0.0;
    bool fallback_tier = false;
};

// Builds a width-h >= d one-hidden-layer net that interpolates the first
// target column: nodes 1..d come from solving the d x d node system, nodes
// d+1..h are zero padding. Resamples node parameters until the system is
// acceptably conditioned and the re-evaluated sup-residual meets
// options.interp_tol. Throws ConditioningError when the round budget ends
// without an acceptable system, and Precondition when the activation behaves
// like a polynomial of degree <= d-2 (then the node system is singular for
// every sample, except in the feasible low-degree regime, which is handled
// with per-node directions).
ShallowNet construct_shallow_interpolant(const Dataset& data, const Activation& act,
                                         Eigen::Index width, std::uint64_t seed,
                                         const InterpolationOptions& options = {},
                                         ShallowBuildInfo* info = nullptr);

// Smallest l with m^(l-1) > d - 2 (returns 2 for d <= 2). Integer
// arithmetic only. m <= 1 is an input error.
int required_depth(int m, int d);

struct DeepBuildInfo {
    int depth = 0;
    std::vector<double> composed_coeffs; // exact coefficients of the chain map
    ShallowBuildInfo shallow;
};

// For a polynomial activation of degree m >= 2: picks chain scalars so the
// (l-1)-fold composition has exact degree m^(l-1) > d-2, then solves the
// shallow problem with the composed polynomial and repackages the result as
// a ComposedNet with chain length l-2.
ComposedNet construct_deep_interpolant(const Dataset& data, const Activation& act,
                                       std::uint64_t seed,
                                       const InterpolationOptions& options = {},
                                       DeepBuildInfo* info = nullptr);

// Rank test of the degree-0..m monomial feature matrix.
struct FeasibilityReport {
    int m = 0;
    long long dim_bound = 0;               // sum_{k=1..m} C(p+k-1, k)
    long long dim_bound_with_constant = 0; // the above + 1
    Eigen::Index feature_rank = 0;         // rank, constant column included
    bool feasible = false;                 // feature_rank == d
};

FeasibilityReport poly_feasibility(const Dataset& data, int m,
                                   double rank_tol_factor = 1.0);

// One net per target column, all built from the same seed; errors from a
// component are rethrown with the component index prefixed.
std::vector<ShallowNet> interpolate_multi_output(const Dataset& data,
                                                 const Activation& act,
                                                 std::uint64_t seed,
                                                 const InterpolationOptions& options = {});

// One-hot interpolation + softmax readout; labels are 1-based class ids.
class Classifier {
  public:
    Classifier(std::vector<ShallowNet> nets, int classes);

    int classes() const noexcept { return classes_; }
    const std::vector<ShallowNet>& nets() const noexcept { return nets_; }

    Eigen::VectorXd scores(const Eigen::VectorXd& x) const;
    Eigen::VectorXd softmax_scores(const Eigen::VectorXd& x) const;
    // 1-based predicted label: argmax of the softmax scores.
    int predict(const Eigen::VectorXd& x) const;

  private:
    std::vector<ShallowNet> nets_;
    int classes_;
};

Classifier fit_classifier(const Eigen::MatrixXd& inputs, const std::vector<int>& labels,
                          const Activation& act, std::uint64_t seed,
                          const InterpolationOptions& options = {});

} // namespace interplab
