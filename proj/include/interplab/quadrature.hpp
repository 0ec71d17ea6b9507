#pragma once

#include <Eigen/Core>

namespace interplab {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Cached rule with n nodes (n >= 2). Nodes come from Newton iteration on the
// Legendre recurrence and are deterministic across calls and platforms.
const GaussLegendre& gauss_legendre(int n);

} // namespace interplab
