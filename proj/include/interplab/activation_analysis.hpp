#pragma once

#include <vector>

#include "interplab/activation.hpp"
#include "interplab/mollifier.hpp"

namespace interplab {

// True iff the activation is indistinguishable from a polynomial of degree
// <= k on a uniform grid over [lo, hi]: every order-(k+1) divided difference
// across sliding windows stays below tau_rel times the function's scale on
// the grid. Coarser grids suppress rounding noise in the high-order
// differences; grid must be at least k+2.
bool poly_degree_test(const Activation& a, int k, double lo = -2.0, double hi = 2.0,
                      int grid = 33, double tau_rel = 1e-8);

// Witness that the smoothed activation has all derivatives of orders
// 0..max_order bounded away from zero at shift b0.
struct DerivativeCertificate {
    double b0 = 0.0;
    int max_order = 0;                    // derivatives 0..max_order inspected
    std::vector<double> derivative_values; // order k at index k
    double epsilon_used = 0.0;
    double tolerance = 0.0;
};

// Searches [-search_halfwidth, search_halfwidth] for a shift where the
// mollified activation's derivatives of orders 0..d-1 all have magnitude
// >= tol. Throws NotFoundError (carrying the best candidate) if no grid
// point qualifies after refinement, and Precondition if the activation
// already behaves like a polynomial of degree <= d-2 (then no such point
// need exist). For d = 1 the polynomial screen is skipped.
DerivativeCertificate find_nonvanishing_point(const Activation& a, int d,
                                              double epsilon, double search_halfwidth,
                                              double tol = 1e-8,
                                              int quadrature_nodes = 257);

// Truncation level T_d = sqrt(d) * (sup |a| over [-M, M] + 1), with the sup
// taken on a 1025-point grid.
double truncation_level(const Activation& a, int d, double M);

} // namespace interplab
