#include "interplab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "interplab/errors.hpp"

namespace interplab {

namespace {

// Legendre P_n(x) and P_n'(x) via the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p_prev = 1.0;
    double p = x;
    for (int k = 2; k <= n; ++k) {
        const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = p_next;
    }
    const double dp = n * (x * p - p_prev) / (x * x - 1.0);
    return {p, dp};
}

GaussLegendre build_rule(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Roots come in +- pairs; iterate on the upper half from the Chebyshev
    // initial guess and mirror.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 64; ++it) {
            const auto [p, dp] = legendre_with_derivative(n, x);
            const double step = p / dp;
            x -= step;
            if (std::abs(step) < 1e-15)
                break;
        }
        const auto [p, dp] = legendre_with_derivative(n, x);
        (void)p;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[half - 1] = 0.0;
        const auto [p, dp] = legendre_with_derivative(n, 0.0);
        (void)p;
        rule.weights[half - 1] = 2.0 / (dp * dp);
    }
    return rule;
}

} // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 2)
        throw Error(ErrorCode::Input, "quadrature needs at least 2 nodes");
    static std::map<int, GaussLegendre> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

} // namespace interplab
