#include "interplab/activation_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "interplab/errors.hpp"

namespace interplab {

bool poly_degree_test(const Activation& a, int k, double lo, double hi, int grid,
                      double tau_rel) {
    if (k < 0)
        throw Error(ErrorCode::Input, "degree bound must be >= 0");
    if (!(hi > lo))
        throw Error(ErrorCode::Input, "test interval must be nonempty");
    if (grid < k + 2)
        throw Error(ErrorCode::Input, "grid must have at least k+2 points");
    if (!(tau_rel > 0.0))
        throw Error(ErrorCode::Input, "tolerance must be positive");

    const double delta = (hi - lo) / (grid - 1);
    std::vector<double> values(static_cast<std::size_t>(grid));
    double scale = 0.0;
    for (int i = 0; i < grid; ++i) {
        values[static_cast<std::size_t>(i)] = a(lo + delta * i);
        scale = std::max(scale, std::abs(values[static_cast<std::size_t>(i)]));
    }
    scale = std::max(scale, std::numeric_limits<double>::min());

    // Order-(k+1) divided difference over a uniform window reduces to an
    // alternating binomial sum divided by (k+1)! * delta^(k+1).
    const int order = k + 1;
    std::vector<double> binom(static_cast<std::size_t>(order) + 1);
    binom[0] = 1.0;
    for (int i = 1; i <= order; ++i)
        binom[static_cast<std::size_t>(i)] =
            binom[static_cast<std::size_t>(i - 1)] * (order - i + 1) / i;

    double log_denominator = 0.0;
    for (int i = 2; i <= order; ++i)
        log_denominator += std::log(static_cast<double>(i));
    log_denominator += order * std::log(delta);

    // An exact polynomial zeroes the alternating sum only up to rounding:
    // the binomial weights total 2^order, so the sum carries noise of about
    // order * eps * 2^order * scale even when the true value is 0. Anything
    // below that floor is indistinguishable from zero and must not be scored
    // as polynomial structure.
    const double log_noise_floor =
        std::log(16.0 * order * std::numeric_limits<double>::epsilon() * scale) +
        order * std::log(2.0);

    for (int start = 0; start + order < grid; ++start) {
        double alternating = 0.0;
        for (int i = 0; i <= order; ++i) {
            const double sign = ((order - i) % 2 == 0) ? 1.0 : -1.0;
            alternating += sign * binom[static_cast<std::size_t>(i)] *
                           values[static_cast<std::size_t>(start + i)];
        }
        // Compare in log space; delta^(k+1) * (k+1)! can overflow a double
        // for high orders on wide intervals.
        const double log_numerator = std::log(std::max(std::abs(alternating), 1e-300));
        const double log_threshold =
            std::max(std::log(tau_rel * scale) + log_denominator, log_noise_floor);
        if (log_numerator > log_threshold)
            return false;
    }
    return true;
}

namespace {

// Smallest derivative magnitude over orders 0..max_order; early exit once it
// drops below the running best (we only need the maximin).
double min_derivative_magnitude(const MollifiedActivation& smoothed, int max_order,
                                double b0, double prune_below) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= max_order; ++k) {
        const double magnitude = std::abs(smoothed.derivative_estimate(k, -b0));
        worst = std::min(worst, magnitude);
        if (worst <= prune_below)
            return worst;
    }
    return worst;
}

} // namespace

DerivativeCertificate find_nonvanishing_point(const Activation& a, int d, double epsilon,
                                              double search_halfwidth, double tol,
                                              int quadrature_nodes) {
    if (d < 1)
        throw Error(ErrorCode::Input, "derivative order count must be >= 1");
    if (!(search_halfwidth > 0.0))
        throw Error(ErrorCode::Input, "search halfwidth must be positive");
    if (d >= 2 &&
        poly_degree_test(a, d - 2, -search_halfwidth, search_halfwidth, d + 16, 3e-12))
        throw Error(ErrorCode::Precondition,
                    "activation behaves like a polynomial of degree <= " +
                        std::to_string(d - 2) +
                        "; a shift with nonvanishing derivatives up to order " +
                        std::to_string(d - 1) + " need not exist");

    const MollifiedActivation smoothed(a, epsilon, quadrature_nodes);
    const int max_order = d - 1;

    double best_b0 = 0.0;
    double best_margin = -1.0;
    auto scan = [&](double lo, double hi, int points) {
        const double step = (hi - lo) / (points - 1);
        for (int i = 0; i < points; ++i) {
            const double b0 = lo + step * i;
            if (std::abs(b0) > search_halfwidth)
                continue;
            const double margin = min_derivative_magnitude(smoothed, max_order, b0,
                                                           best_margin);
            if (margin > best_margin) {
                best_margin = margin;
                best_b0 = b0;
            }
        }
    };

    scan(-search_halfwidth, search_halfwidth, 4097);
    // One x4 refinement pass around the incumbent coarse cell.
    const double coarse_step = 2.0 * search_halfwidth / 4096.0;
    scan(best_b0 - coarse_step, best_b0 + coarse_step, 9);

    if (best_margin < tol)
        throw NotFoundError("no shift with all derivative magnitudes >= tolerance",
                            best_b0, best_margin);

    DerivativeCertificate cert;
    cert.b0 = best_b0;
    cert.max_order = max_order;
    cert.derivative_values.resize(static_cast<std::size_t>(d));
    for (int k = 0; k <= max_order; ++k)
        cert.derivative_values[static_cast<std::size_t>(k)] =
            smoothed.derivative_estimate(k, -best_b0);
    cert.epsilon_used = epsilon;
    cert.tolerance = tol;
    return cert;
}

double truncation_level(const Activation& a, int d, double M) {
    if (d < 1)
        throw Error(ErrorCode::Input, "dimension must be >= 1");
    if (!(M > 0.0))
        throw Error(ErrorCode::Input, "range bound must be positive");
    double sup = 0.0;
    for (int i = 0; i < 1025; ++i) {
        const double t = -M + 2.0 * M * i / 1024.0;
        sup = std::max(sup, std::abs(a(t)));
    }
    return std::sqrt(static_cast<double>(d)) * (sup + 1.0);
}

} // namespace interplab
