#pragma once

#include "interplab/activation.hpp"
#include "interplab/quadrature.hpp"

namespace interplab {

// Compactly supported smoothing kernel on (-1, 1): C * exp(-1 / (1 - z^2)),
// normalized to unit mass.
double bump_kernel(double z);
double bump_kernel_unnormalized(double z);

// Smoothed activation
//   a_eps(t) = integral a(t - eps z) * bump(z) dz over [-1, 1],
// evaluated by Gauss-Legendre quadrature. The node count is rounded up to an
// even value so the rule is symmetric about z = 0 (an odd rule puts a node
// at the kernel's peak, which breaks the exact symmetry cancellation for
// even integrands around jump points). Instances are immutable.
class MollifiedActivation {
  public:
    MollifiedActivation(Activation base, double epsilon, int quadrature_nodes = 257);

    double operator()(double t) const;

    // k-th derivative estimate by central finite differences on the smoothed
    // function, using a (k+1)-point stencil with step epsilon / 4.
    double derivative_estimate(int order, double t) const;

    const Activation& base() const noexcept { return base_; }
    double epsilon() const noexcept { return epsilon_; }
    int quadrature_nodes() const noexcept { return nodes_; }

  private:
    Activation base_;
    double epsilon_;
    int nodes_;
};

} // namespace interplab
