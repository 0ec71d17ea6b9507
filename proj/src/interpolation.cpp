#include "interplab/interpolation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "interplab/activation_analysis.hpp"
#include "interplab/errors.hpp"
#include "interplab/polynomial.hpp"
#include "interplab/rng.hpp"

namespace interplab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double condition_estimate(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin <= 0.0)
        return std::numeric_limits<double>::infinity();
    return smax / smin;
}

// One candidate node system: arguments arg(i, j) fed to the activation for
// point i / node j, plus the net parameters (weight rows, shifts) that
// reproduce those arguments on raw inputs.
struct NodeSystem {
    Eigen::MatrixXd weights; // d x p rows for nodes 1..d
    Eigen::VectorXd shifts;  // d
    Eigen::MatrixXd features; // d x d, act applied to arguments
};

// --- samplers ----------------------------------------------------------
//
// Each sampler returns per-node (slope, center) pairs in projection space;
// the caller folds them into weight rows a_j * w and shifts a_j * c_j. All
// randomness is addressed as (round, slot) on one substream so a round's
// draws never depend on how many other rounds ran.

struct ProjectionNodes {
    Eigen::VectorXd slopes;  // a_j
    Eigen::VectorXd centers; // c_j; feature argument is a_j (t - c_j)
};

double signed_unit(const CounterRng& rng, std::uint64_t round, std::uint64_t slot) {
    return rng.uniform(round, slot) < 0.5 ? -1.0 : 1.0;
}

// Strategy 0: every node anchored at one sorted projection, center jittered
// within the local gap and slope steep relative to that gap, so each feature
// transitions near its own data point.
ProjectionNodes sample_anchored(const CounterRng& rng, std::uint64_t round,
                                const Eigen::VectorXd& sorted_t, double span) {
    const Eigen::Index d = sorted_t.size();
    Eigen::VectorXd gaps(d);
    if (d == 1) {
        gaps[0] = span;
    } else {
        for (Eigen::Index j = 0; j < d; ++j) {
            double gap = std::numeric_limits<double>::infinity();
            if (j > 0)
                gap = std::min(gap, sorted_t[j] - sorted_t[j - 1]);
            if (j + 1 < d)
                gap = std::min(gap, sorted_t[j + 1] - sorted_t[j]);
            gaps[j] = std::max(gap, 1e-12 * span);
        }
    }
    const double rho =
        std::exp(rng.uniform_in(std::log(0.5), std::log(4.0 * std::max<double>(d, 2.0)),
                                round, 0));
    ProjectionNodes nodes{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    for (Eigen::Index j = 0; j < d; ++j) {
        const std::uint64_t base = 8 + 4 * static_cast<std::uint64_t>(j);
        nodes.centers[j] = sorted_t[j] + rng.uniform_in(-0.45, 0.45, round, base) * gaps[j];
        nodes.slopes[j] = signed_unit(rng, round, base + 1) * rho / gaps[j];
    }
    return nodes;
}

// Strategy 1: slopes spread log-uniformly over several decades, centers
// uniform over the inflated projection range; catches scales strategy 0
// misses.
ProjectionNodes sample_multiscale(const CounterRng& rng, std::uint64_t round,
                                  const Eigen::VectorXd& sorted_t, double span) {
    const Eigen::Index d = sorted_t.size();
    const double lo = sorted_t[0] - 0.25 * span;
    const double hi = sorted_t[d - 1] + 0.25 * span;
    const double slope_lo = 0.25 / span;
    const double slope_hi = 8.0 * std::max<double>(d, 1.0) / span;
    ProjectionNodes nodes{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    for (Eigen::Index j = 0; j < d; ++j) {
        const std::uint64_t base = 8 + 4 * static_cast<std::uint64_t>(j);
        const double magnitude =
            std::exp(rng.uniform_in(std::log(slope_lo), std::log(slope_hi), round, base));
        nodes.slopes[j] = signed_unit(rng, round, base + 1) * magnitude;
        nodes.centers[j] = rng.uniform_in(lo, hi, round, base + 2);
    }
    return nodes;
}

// Strategy 2: moderate arguments |a_j t_i| <= 2 with Chebyshev-spread
// centers; keeps polynomial-ish activations away from their fast-growth
// region.
ProjectionNodes sample_moderate(const CounterRng& rng, std::uint64_t round,
                                const Eigen::VectorXd& sorted_t, double span) {
    const Eigen::Index d = sorted_t.size();
    const double tmax = std::max(std::max(std::abs(sorted_t[0]), std::abs(sorted_t[d - 1])),
                                 1e-300);
    const double mid = 0.5 * (sorted_t[0] + sorted_t[d - 1]);
    ProjectionNodes nodes{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    for (Eigen::Index j = 0; j < d; ++j) {
        const std::uint64_t base = 8 + 4 * static_cast<std::uint64_t>(j);
        nodes.slopes[j] = rng.uniform_in(-1.0, 1.0, round, base) * 2.0 / tmax;
        const double chebyshev =
            std::cos((2.0 * static_cast<double>(j) + 1.0) * kPi / (2.0 * static_cast<double>(d)));
        nodes.centers[j] =
            mid + 0.5 * span * chebyshev + rng.uniform_in(-0.1, 0.1, round, base + 1) * span;
    }
    return nodes;
}

// Polynomial activations get their own two samplers operating on
// projections normalized to [-1, 1] (high-degree features explode off a
// bounded box; normalization is folded back into the returned parameters).
ProjectionNodes sample_poly_normalized(const CounterRng& rng, std::uint64_t round,
                                       const Eigen::VectorXd& sorted_norm_t) {
    const Eigen::Index d = sorted_norm_t.size();
    const double inflation = std::exp(rng.uniform_in(std::log(1.0), std::log(1.6), round, 0));
    ProjectionNodes nodes{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    const bool chebyshev_round = (round % 2 == 0);
    for (Eigen::Index j = 0; j < d; ++j) {
        const std::uint64_t base = 8 + 4 * static_cast<std::uint64_t>(j);
        double center;
        if (chebyshev_round) {
            center = inflation * std::cos((2.0 * static_cast<double>(j) + 1.0) * kPi /
                                          (2.0 * static_cast<double>(d))) +
                     rng.uniform_in(-0.05, 0.05, round, base);
        } else {
            // per-node quantile of the normalized projections
            const double q = (static_cast<double>(j) + 0.5) / static_cast<double>(d);
            const double pos = q * static_cast<double>(d - 1);
            const Eigen::Index lo = static_cast<Eigen::Index>(pos);
            const Eigen::Index hi = std::min<Eigen::Index>(lo + 1, d - 1);
            const double frac = pos - static_cast<double>(lo);
            const double quantile =
                sorted_norm_t[lo] + frac * (sorted_norm_t[hi] - sorted_norm_t[lo]);
            center = quantile * inflation + rng.uniform_in(-0.08, 0.08, round, base);
        }
        nodes.centers[j] = center;
        nodes.slopes[j] =
            signed_unit(rng, round, base + 2) * rng.uniform_in(0.8, 1.25, round, base + 1);
    }
    return nodes;
}

// --- node system assembly ----------------------------------------------

NodeSystem univariate_system(const Dataset& data, const Activation& act,
                             const Eigen::VectorXd& w, const Eigen::VectorXd& t,
                             const ProjectionNodes& nodes) {
    const Eigen::Index d = data.count();
    NodeSystem sys;
    sys.weights.resize(d, data.dim());
    sys.shifts.resize(d);
    sys.features.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        sys.weights.row(j) = nodes.slopes[j] * w.transpose();
        sys.shifts[j] = nodes.slopes[j] * nodes.centers[j];
        for (Eigen::Index i = 0; i < d; ++i)
            sys.features(i, j) = act(nodes.slopes[j] * (t[i] - nodes.centers[j]));
    }
    return sys;
}

// Low-degree polynomial activations (degree <= d-2) cannot separate d points
// along a single direction; per-node directions restore the multivariate
// monomial span whenever the feasibility rank test passes.
NodeSystem multivariate_system(const Dataset& data, const Activation& act,
                               const CounterRng& rng, std::uint64_t round) {
    const Eigen::Index d = data.count();
    const Eigen::Index p = data.dim();
    NodeSystem sys;
    sys.weights.resize(d, p);
    sys.shifts.resize(d);
    sys.features.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const std::uint64_t base = static_cast<std::uint64_t>(j) * (static_cast<std::uint64_t>(p) + 4);
        Eigen::VectorXd direction(p);
        for (Eigen::Index k = 0; k < p; ++k)
            direction[k] = rng.normal(round, base + static_cast<std::uint64_t>(k));
        const double norm = direction.norm();
        if (norm == 0.0)
            direction[0] = 1.0;
        else
            direction /= norm;

        Eigen::VectorXd proj = data.inputs() * direction;
        const double scale = std::max(proj.cwiseAbs().maxCoeff(), 1e-300);
        const double slope = signed_unit(rng, round, base + p) *
                             rng.uniform_in(0.5, 1.5, round, base + p + 1) / scale;
        Eigen::VectorXd args = slope * proj;

        // center at a random quantile of this node's own arguments
        Eigen::VectorXd sorted_args = args;
        std::sort(sorted_args.data(), sorted_args.data() + sorted_args.size());
        const double q = rng.uniform_in(0.15, 0.85, round, base + p + 2);
        const double pos = q * static_cast<double>(d - 1);
        const Eigen::Index lo = static_cast<Eigen::Index>(pos);
        const Eigen::Index hi = std::min<Eigen::Index>(lo + 1, d - 1);
        const double center =
            sorted_args[lo] + (pos - static_cast<double>(lo)) * (sorted_args[hi] - sorted_args[lo]);

        sys.weights.row(j) = slope * direction.transpose();
        sys.shifts[j] = center;
        for (Eigen::Index i = 0; i < d; ++i)
            sys.features(i, j) = act(args[i] - center);
    }
    return sys;
}

struct SolveOutcome {
    Eigen::VectorXd node_weights;
    double max_residual = 0.0;
};

// Column-equilibrated LU solve with iterative refinement; the residual is
// measured against the raw (unequilibrated) system, which is exactly what
// the assembled net evaluates.
std::optional<SolveOutcome> solve_system(const Eigen::MatrixXd& features,
                                         const Eigen::VectorXd& y, int refinement_steps,
                                         double tol) {
    const Eigen::Index d = features.rows();
    Eigen::VectorXd colmax = features.cwiseAbs().colwise().maxCoeff().transpose();
    for (Eigen::Index j = 0; j < d; ++j)
        if (colmax[j] == 0.0)
            return std::nullopt;
    const Eigen::MatrixXd equilibrated = features.array().rowwise() / colmax.transpose().array();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(equilibrated);
    Eigen::VectorXd scaled = lu.solve(y);
    for (int step = 0; step < refinement_steps; ++step)
        scaled += lu.solve(y - equilibrated * scaled);
    SolveOutcome outcome;
    outcome.node_weights = scaled.array() / colmax.array();
    outcome.max_residual = (features * outcome.node_weights - y).cwiseAbs().maxCoeff();
    if (!outcome.node_weights.allFinite() || !std::isfinite(outcome.max_residual))
        return std::nullopt;
    if (outcome.max_residual > tol)
        return std::nullopt;
    return outcome;
}

ShallowNet assemble_net(const Dataset& data, const Activation& act, Eigen::Index width,
                        const NodeSystem& sys, const Eigen::VectorXd& node_weights) {
    const Eigen::Index d = data.count();
    ShallowNet net{Eigen::MatrixXd::Zero(width, data.dim()), Eigen::VectorXd::Zero(width),
                   Eigen::VectorXd::Zero(width), 0.0, act};
    net.hidden_weights.topRows(d) = sys.weights;
    net.hidden_shifts.head(d) = sys.shifts;
    net.output_weights.head(d) = node_weights;
    return net;
}

// The precondition gate runs the divided-difference polynomial screen with a
// coarser grid and a tighter tolerance than the user-facing defaults:
// sigmoid's order-19 differences sit near 1e-10 (genuinely non-polynomial
// but below the 1e-8 default), while float64 rounding noise on true
// polynomials stays under 1e-13 at this grid.
bool behaves_polynomially(const Activation& act, int degree_bound) {
    return poly_degree_test(act, degree_bound, -2.0, 2.0, degree_bound + 6, 3e-12);
}

} // namespace

SeparatingDirection find_separating_direction(const Dataset& data, std::uint64_t seed) {
    const Eigen::Index d = data.count();
    const Eigen::Index p = data.dim();
    const CounterRng rng(seed, "sep-dir");

    SeparatingDirection best;
    best.min_gap = -1.0;
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        Eigen::VectorXd w(p);
        for (Eigen::Index k = 0; k < p; ++k)
            w[k] = rng.normal(attempt, static_cast<std::uint64_t>(k));
        const double norm = w.norm();
        if (norm == 0.0)
            continue;
        w /= norm;
        Eigen::VectorXd t = data.inputs() * w;
        double gap = std::numeric_limits<double>::infinity();
        if (d > 1) {
            Eigen::VectorXd sorted = t;
            std::sort(sorted.data(), sorted.data() + sorted.size());
            for (Eigen::Index i = 1; i < d; ++i)
                gap = std::min(gap, sorted[i] - sorted[i - 1]);
        }
        if (gap > best.min_gap) {
            best.w = w;
            best.projections = t;
            best.min_gap = gap;
        }
    }
    if (!(best.min_gap > 0.0))
        throw Error(ErrorCode::Internal,
                    "no separating direction in 64 attempts; inputs are not distinct");
    return best;
}

ShallowNet construct_shallow_interpolant(const Dataset& data, const Activation& act,
                                         Eigen::Index width, std::uint64_t seed,
                                         const InterpolationOptions& options,
                                         ShallowBuildInfo* info) {
    const Eigen::Index d = data.count();
    if (width < d)
        throw Error(ErrorCode::Precondition, "width must be at least the point count");

    const bool poly = act.is_polynomial();
    const int degree = poly ? act.poly_degree() : -1;

    // Route selection: low-degree polynomials go multivariate (gated by the
    // rank test), everything else goes through a separating direction.
    bool multivariate = false;
    if (poly && degree <= static_cast<int>(d) - 2) {
        if (degree == 0)
            throw Error(ErrorCode::Precondition,
                        "constant activation cannot interpolate more than one point");
        const FeasibilityReport feas = poly_feasibility(data, degree);
        if (!feas.feasible)
            throw Error(ErrorCode::Precondition,
                        "polynomial activation of degree " + std::to_string(degree) +
                            " is infeasible for this dataset (feature rank " +
                            std::to_string(feas.feature_rank) + " < " + std::to_string(d) + ")");
        multivariate = true;
    } else if (!poly && d >= 2) {
        if (behaves_polynomially(act, static_cast<int>(d) - 2))
            throw Error(ErrorCode::Precondition,
                        "activation behaves like a polynomial of degree <= " +
                            std::to_string(d - 2) + " on the sampling range");
    }

    const Eigen::VectorXd y = data.target_column(0);
    const CounterRng rng(seed, "ab-sampling");

    // Univariate route precomputation.
    Eigen::VectorXd w, t, sorted_t, sorted_norm_t;
    double span = 1.0, mid = 0.0, halfspan = 1.0;
    if (!multivariate) {
        SeparatingDirection dir = find_separating_direction(data, seed);
        w = dir.w;
        t = dir.projections;
        sorted_t = t;
        std::sort(sorted_t.data(), sorted_t.data() + sorted_t.size());
        span = (d > 1) ? (sorted_t[d - 1] - sorted_t[0])
                       : std::max(std::abs(sorted_t[0]), 1.0);
        if (span == 0.0)
            span = 1.0;
        mid = (d > 1) ? 0.5 * (sorted_t[0] + sorted_t[d - 1]) : 0.0;
        halfspan = (d > 1) ? 0.5 * span : 1.0;
        sorted_norm_t = (sorted_t.array() - mid) / halfspan;
    }

    // Every sampler addresses its randomness as (round, slot), so a round can
    // be regenerated at any time without replaying the rounds before it.
    const auto sample_round = [&](int round) {
        if (multivariate)
            return multivariate_system(data, act, rng, static_cast<std::uint64_t>(round));
        if (poly) {
            const ProjectionNodes nodes =
                sample_poly_normalized(rng, static_cast<std::uint64_t>(round), sorted_norm_t);
            // fold the [-1,1] normalization of projections into the
            // parameters: argument a (tn - c) = (a/halfspan) t - a (mid/halfspan + c)
            ProjectionNodes folded{nodes.slopes / halfspan,
                                   Eigen::VectorXd(nodes.centers.size())};
            for (Eigen::Index j = 0; j < nodes.centers.size(); ++j)
                folded.centers[j] = mid + halfspan * nodes.centers[j];
            return univariate_system(data, act, w, t, folded);
        }
        ProjectionNodes nodes;
        switch (round % 3) {
        case 0:
            nodes = sample_anchored(rng, static_cast<std::uint64_t>(round), sorted_t, span);
            break;
        case 1:
            nodes = sample_multiscale(rng, static_cast<std::uint64_t>(round), sorted_t, span);
            break;
        default:
            nodes = sample_moderate(rng, static_cast<std::uint64_t>(round), sorted_t, span);
            break;
        }
        return univariate_system(data, act, w, t, nodes);
    };

    // Scan all rounds first and rank by condition number; the solve then
    // walks candidates best-conditioned first. Returning the best-conditioned
    // workable system (rather than the first) keeps the readout weights and
    // hidden slopes as tame as the sampling portfolio allows, which the
    // downstream curvature diagnostics depend on.
    struct ScoredRound {
        double condition;
        int round;
    };
    std::vector<ScoredRound> candidates;
    candidates.reserve(static_cast<std::size_t>(options.max_rounds));
    double best_condition = std::numeric_limits<double>::infinity();
    int best_round = -1;

    for (int round = 0; round < options.max_rounds; ++round) {
        const NodeSystem sys = sample_round(round);
        if (!sys.features.allFinite())
            continue;
        Eigen::VectorXd colmax = sys.features.cwiseAbs().colwise().maxCoeff().transpose();
        if ((colmax.array() == 0.0).any())
            continue;
        const Eigen::MatrixXd equilibrated =
            sys.features.array().rowwise() / colmax.transpose().array();
        const double condition = condition_estimate(equilibrated);
        if (condition < best_condition) {
            best_condition = condition;
            best_round = round;
        }
        if (condition < options.cond_accept)
            candidates.push_back({condition, round});
    }
    std::sort(candidates.begin(), candidates.end(), [](const ScoredRound& a,
                                                       const ScoredRound& b) {
        return a.condition != b.condition ? a.condition < b.condition : a.round < b.round;
    });

    for (const ScoredRound& cand : candidates) {
        const NodeSystem sys = sample_round(cand.round);
        if (auto solved = solve_system(sys.features, y, 1, options.interp_tol)) {
            ShallowNet net = assemble_net(data, act, width, sys, solved->node_weights);
            const double verified =
                (forward_all(net, data.inputs()) - y).cwiseAbs().maxCoeff();
            if (verified <= options.interp_tol) {
                if (info)
                    *info = {cand.condition, cand.round + 1, verified, false};
                return net;
            }
        }
    }

    // Fallback tier: the best-conditioned round gets a deeper refinement and
    // must still pass the residual gate.
    if (best_round >= 0 && best_condition < options.cond_fallback) {
        const NodeSystem sys = sample_round(best_round);
        if (auto solved = solve_system(sys.features, y, 3, options.interp_tol)) {
            ShallowNet net = assemble_net(data, act, width, sys, solved->node_weights);
            const double verified = (forward_all(net, data.inputs()) - y).cwiseAbs().maxCoeff();
            if (verified <= options.interp_tol) {
                if (info)
                    *info = {best_condition, options.max_rounds, verified, true};
                return net;
            }
        }
    }
    throw ConditioningError("no acceptably conditioned node system in " +
                                std::to_string(options.max_rounds) + " rounds",
                            best_condition, options.max_rounds);
}

int required_depth(int m, int d) {
    if (m <= 1)
        throw Error(ErrorCode::Input, "activation degree must be >= 2 to gain degree");
    if (d <= 2)
        return 2;
    const long long need = static_cast<long long>(d) - 2;
    int l = 2;
    long long power = m; // m^(l-1)
    while (power <= need) {
        power *= m;
        ++l;
        if (l > 64)
            throw Error(ErrorCode::Internal, "depth search overflow");
    }
    return l;
}

ComposedNet construct_deep_interpolant(const Dataset& data, const Activation& act,
                                       std::uint64_t seed,
                                       const InterpolationOptions& options,
                                       DeepBuildInfo* info) {
    if (!act.is_polynomial() || act.poly_degree() < 2)
        throw Error(ErrorCode::Precondition,
                    "deep construction needs a polynomial activation of degree >= 2");
    const int m = act.poly_degree();
    const int depth = required_depth(m, static_cast<int>(data.count()));
    const int chain_length = depth - 2;
    const std::vector<double>& sigma_coeffs = act.poly_coeffs();

    const CounterRng rng(seed, "chain");
    std::vector<double> chain(static_cast<std::size_t>(chain_length));
    std::vector<double> composed;
    bool degree_ok = false;
    for (std::uint64_t attempt = 0; attempt < 16 && !degree_ok; ++attempt) {
        for (int k = 0; k < chain_length; ++k) {
            const double sign = signed_unit(rng, attempt, static_cast<std::uint64_t>(2 * k));
            const double jitter =
                rng.uniform_in(0.0, 0.25, attempt, static_cast<std::uint64_t>(2 * k + 1));
            chain[static_cast<std::size_t>(k)] = sign * (1.0 + jitter);
        }
        composed = sigma_coeffs;
        for (double c : chain) {
            std::vector<double> inner(composed.size());
            for (std::size_t i = 0; i < composed.size(); ++i)
                inner[i] = c * composed[i];
            composed = poly::compose(sigma_coeffs, inner);
        }
        long long expected_degree = 1;
        for (int layer = 0; layer < depth - 1; ++layer)
            expected_degree *= m;
        const double scale =
            std::abs(*std::max_element(composed.begin(), composed.end(),
                                       [](double a, double b) {
                                           return std::abs(a) < std::abs(b);
                                       }));
        degree_ok = poly::degree(composed, 1e-300 * std::max(scale, 1.0)) ==
                    static_cast<int>(expected_degree);
    }
    if (!degree_ok)
        throw Error(ErrorCode::Internal,
                    "composed polynomial degree collapsed across all chain samples");

    const Activation composed_act = Activation::polynomial(composed);
    ShallowBuildInfo shallow_info;
    const InterpolationOptions opts = options;
    for (std::uint64_t attempt = 0; attempt < 4; ++attempt) {
        ShallowNet flat;
        try {
            flat = construct_shallow_interpolant(
                data, composed_act, data.count(),
                seed + attempt * 0x9E3779B97F4A7C15ull, opts, &shallow_info);
        } catch (const ConditioningError&) {
            if (attempt == 3)
                throw;
            continue;
        }
        ComposedNet net{flat.hidden_weights, flat.hidden_shifts, chain,
                        flat.output_weights, act};
        // The shallow solve evaluated the composed polynomial by Horner;
        // the assembled net applies the activation layer by layer. Verify
        // the layerwise residual, which is what callers will measure.
        const double verified =
            (forward_all(net, data.inputs()) - data.target_column(0)).cwiseAbs().maxCoeff();
        if (verified <= options.interp_tol) {
            if (info) {
                info->depth = depth;
                info->composed_coeffs = composed;
                info->shallow = shallow_info;
                info->shallow.max_residual = verified;
            }
            return net;
        }
    }
    throw ConditioningError("layerwise residual check failed after all attempts",
                            shallow_info.condition, options.max_rounds);
}

namespace {

long long binomial_ll(long long n, long long k) {
    if (k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    long long acc = 1;
    for (long long i = 1; i <= k; ++i)
        acc = acc * (n - k + i) / i;
    return acc;
}

// All exponent tuples over p variables with total degree 0..m, low degrees
// first (the constant column leads).
void enumerate_monomials(int p, int m, std::vector<int>& current, int remaining,
                         std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == p - 1) {
        for (int last = 0; last <= remaining; ++last) {
            current.push_back(last);
            out.push_back(current);
            current.pop_back();
        }
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        current.push_back(e);
        enumerate_monomials(p, m, current, remaining - e, out);
        current.pop_back();
    }
}

} // namespace

FeasibilityReport poly_feasibility(const Dataset& data, int m, double rank_tol_factor) {
    if (m < 1)
        throw Error(ErrorCode::Input, "polynomial degree must be >= 1");
    const Eigen::Index d = data.count();
    const int p = static_cast<int>(data.dim());

    FeasibilityReport report;
    report.m = m;
    report.dim_bound = 0;
    for (int k = 1; k <= m; ++k)
        report.dim_bound += binomial_ll(p + k - 1, k);
    report.dim_bound_with_constant = report.dim_bound + 1;

    std::vector<std::vector<int>> exponents_by_degree;
    for (int total = 0; total <= m; ++total) {
        std::vector<std::vector<int>> level;
        std::vector<int> current;
        enumerate_monomials(p, m, current, total, level);
        for (auto& e : level) {
            int sum = std::accumulate(e.begin(), e.end(), 0);
            if (sum == total)
                exponents_by_degree.push_back(std::move(e));
        }
    }

    const Eigen::Index cols = static_cast<Eigen::Index>(exponents_by_degree.size());
    Eigen::MatrixXd features(d, cols);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            double value = 1.0;
            const auto& expo = exponents_by_degree[static_cast<std::size_t>(c)];
            for (int var = 0; var < p; ++var)
                value *= std::pow(data.inputs()(i, var), expo[static_cast<std::size_t>(var)]);
            features(i, c) = value;
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(features);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = rank_tol_factor * static_cast<double>(d) *
                       std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol)
            ++rank;
    report.feature_rank = rank;
    report.feasible = (rank == d);
    return report;
}

std::vector<ShallowNet> interpolate_multi_output(const Dataset& data, const Activation& act,
                                                 std::uint64_t seed,
                                                 const InterpolationOptions& options) {
    std::vector<ShallowNet> nets;
    nets.reserve(static_cast<std::size_t>(data.target_dim()));
    for (Eigen::Index component = 0; component < data.target_dim(); ++component) {
        Dataset column(data.inputs(), data.targets().col(component), Dataset::AllowDuplicates{});
        try {
            nets.push_back(
                construct_shallow_interpolant(column, act, data.count(), seed, options));
        } catch (const ConditioningError& e) {
            throw ConditioningError("output component " + std::to_string(component) + ": " +
                                        e.what(),
                                    e.best_condition(), e.rounds());
        } catch (const Error& e) {
            throw Error(e.code(),
                        "output component " + std::to_string(component) + ": " + e.what());
        }
    }
    return nets;
}

Classifier::Classifier(std::vector<ShallowNet> nets, int classes)
    : nets_(std::move(nets)), classes_(classes) {
    if (classes_ < 1 || nets_.size() != static_cast<std::size_t>(classes_))
        throw Error(ErrorCode::Internal, "classifier needs one net per class");
}

Eigen::VectorXd Classifier::scores(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(classes_);
    for (int k = 0; k < classes_; ++k)
        out[k] = forward(nets_[static_cast<std::size_t>(k)], x);
    return out;
}

Eigen::VectorXd Classifier::softmax_scores(const Eigen::VectorXd& x) const {
    Eigen::VectorXd s = scores(x);
    const double shift = s.maxCoeff();
    Eigen::VectorXd e = (s.array() - shift).exp();
    return e / e.sum();
}

int Classifier::predict(const Eigen::VectorXd& x) const {
    Eigen::VectorXd probabilities = softmax_scores(x);
    Eigen::Index best = 0;
    probabilities.maxCoeff(&best);
    return static_cast<int>(best) + 1;
}

Classifier fit_classifier(const Eigen::MatrixXd& inputs, const std::vector<int>& labels,
                          const Activation& act, std::uint64_t seed,
                          const InterpolationOptions& options) {
    const Eigen::Index d = inputs.rows();
    if (static_cast<Eigen::Index>(labels.size()) != d)
        throw Error(ErrorCode::Input, "one label per input row required");
    int classes = 0;
    for (int label : labels) {
        if (label < 1)
            throw Error(ErrorCode::Input, "labels are 1-based class ids");
        classes = std::max(classes, label);
    }

    Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(d, classes);
    for (Eigen::Index i = 0; i < d; ++i)
        one_hot(i, labels[static_cast<std::size_t>(i)] - 1) = 1.0;

    const Dataset data(inputs, one_hot);
    Classifier classifier(interpolate_multi_output(data, act, seed, options), classes);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (classifier.predict(inputs.row(i).transpose()) != labels[static_cast<std::size_t>(i)])
            throw Error(ErrorCode::Internal,
                        "training prediction mismatch after exact interpolation");
    }
    return classifier;
}

} // namespace interplab
