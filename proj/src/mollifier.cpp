#include "interplab/mollifier.hpp"

#include <cmath>
#include <utility>

#include "interplab/errors.hpp"

namespace interplab {

namespace {

// Unit-mass normalization for the bump, computed once from a high-order
// rule (the integrand is smooth; 1024 nodes is far past convergence).
double bump_mass() {
    static const double mass = [] {
        const GaussLegendre& rule = gauss_legendre(1024);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * bump_kernel_unnormalized(rule.nodes[i]);
        return acc;
    }();
    return mass;
}

double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i)
        acc = acc * (n - k + i) / i;
    return acc;
}

} // namespace

double bump_kernel_unnormalized(double z) {
    if (std::abs(z) >= 1.0)
        return 0.0;
    return std::exp(-1.0 / (1.0 - z * z));
}

double bump_kernel(double z) { return bump_kernel_unnormalized(z) / bump_mass(); }

MollifiedActivation::MollifiedActivation(Activation base, double epsilon,
                                         int quadrature_nodes)
    : base_(std::move(base)), epsilon_(epsilon), nodes_(quadrature_nodes) {
    if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_))
        throw Error(ErrorCode::Input, "mollifier epsilon must be positive and finite");
    if (nodes_ < 2)
        throw Error(ErrorCode::Input, "mollifier needs at least 2 quadrature nodes");
    if (nodes_ % 2 == 1)
        ++nodes_; // symmetric rule: no node at z = 0
}

double MollifiedActivation::operator()(double t) const {
    const GaussLegendre& rule = gauss_legendre(nodes_);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const double z = rule.nodes[i];
        acc += rule.weights[i] * base_(t - epsilon_ * z) * bump_kernel_unnormalized(z);
    }
    return acc / bump_mass();
}

double MollifiedActivation::derivative_estimate(int order, double t) const {
    if (order < 0)
        throw Error(ErrorCode::Input, "derivative order must be >= 0");
    if (order == 0)
        return (*this)(t);
    const double h = epsilon_ / 4.0;
    double acc = 0.0;
    for (int j = 0; j <= order; ++j) {
        const double offset = (order / 2.0 - j) * h;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        acc += sign * binomial(order, j) * (*this)(t + offset);
    }
    return acc / std::pow(h, order);
}

} // namespace interplab
