#pragma once

#include "interplab/dataset.hpp"
#include "interplab/network.hpp"

namespace interplab {

// Analytic gradient of each residual f_i with respect to the flattened
// parameters (rows of the result follow dataset order, columns follow the
// flattening order). Requires a smooth activation.
Eigen::MatrixXd residual_jacobian(const ShallowNet& net, const Dataset& data);
Eigen::MatrixXd residual_jacobian(const ComposedNet& net, const Dataset& data);
Eigen::MatrixXd residual_jacobian(const NetModel& net, const Dataset& data);

enum class HessianMethod {
    GaussNewtonAtZero, // 2 J^T J; valid only on the zero-loss set
    FiniteDifference,  // central second differences, step 1e-4 (1 + |param|)
};

Eigen::MatrixXd loss_hessian(const ShallowNet& net, const Dataset& data,
                             HessianMethod method, double interp_tol = 1e-6);
Eigen::MatrixXd loss_hessian(const ComposedNet& net, const Dataset& data,
                             HessianMethod method, double interp_tol = 1e-6);
Eigen::MatrixXd loss_hessian(const NetModel& net, const Dataset& data,
                             HessianMethod method, double interp_tol = 1e-6);

// Eigenvalue audit of the Gauss-Newton Hessian at an interpolation point.
struct SpectrumReport {
    Eigen::VectorXd eigenvalues; // ascending
    Eigen::Index n = 0;          // parameter count
    Eigen::Index d = 0;          // data count
    int positive_count = 0;
    int zero_count = 0;
    int negative_count = 0;
    double zero_threshold = 0.0;     // relative: factor * max(spectral radius, 1)
    double gauss_newton_check = 0.0; // max |H_fd - 2 J^T J|
    // Genericity flag: positive_count = d requires rank(J) = d; a deficient
    // Jacobian is reported, not failed.
    bool jacobian_full_rank = false;
    double smallest_jacobian_singular = 0.0;
};

// Requires loss <= interp_tol^2 * d (the point must lie on the zero-loss
// set) and n > d (overparametrization). zero_threshold_factor scales the
// eigenvalue zero-classification band.
SpectrumReport spectrum_at_minimum(const ShallowNet& net, const Dataset& data,
                                   double interp_tol = 1e-6,
                                   double zero_threshold_factor = 1e-6);
SpectrumReport spectrum_at_minimum(const ComposedNet& net, const Dataset& data,
                                   double interp_tol = 1e-6,
                                   double zero_threshold_factor = 1e-6);
SpectrumReport spectrum_at_minimum(const NetModel& net, const Dataset& data,
                                   double interp_tol = 1e-6,
                                   double zero_threshold_factor = 1e-6);

} // namespace interplab
