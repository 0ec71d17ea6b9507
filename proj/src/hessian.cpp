#include "interplab/hessian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "interplab/errors.hpp"

namespace interplab {

namespace {

// Loss as a function of the flat parameter vector, shape fixed by the net.
using LossFn = std::function<double(const Eigen::VectorXd&)>;

LossFn make_loss_fn(const ShallowNet& net, const Dataset& data) {
    const Eigen::Index h = net.width();
    const Eigen::Index p = net.input_dim();
    const Activation act = net.act;
    return [h, p, act, &data](const Eigen::VectorXd& params) {
        return loss_and_residuals(unflatten_shallow(params, h, p, act), data).loss;
    };
}

LossFn make_loss_fn(const ComposedNet& net, const Dataset& data) {
    const Eigen::Index h = net.width();
    const Eigen::Index p = net.input_dim();
    const Eigen::Index chain = static_cast<Eigen::Index>(net.chain.size());
    const Activation act = net.act;
    return [h, p, chain, act, &data](const Eigen::VectorXd& params) {
        return loss_and_residuals(unflatten_composed(params, h, p, chain, act), data).loss;
    };
}

// Central second differences with per-coordinate step 1e-4 (1 + |theta_i|).
// The cross formula is evaluated once per unordered pair and mirrored, so the
// result is symmetric by construction.
Eigen::MatrixXd fd_hessian(const LossFn& loss, const Eigen::VectorXd& theta) {
    const Eigen::Index n = theta.size();
    Eigen::VectorXd step(n);
    for (Eigen::Index i = 0; i < n; ++i)
        step[i] = 1e-4 * (1.0 + std::abs(theta[i]));

    const double base = loss(theta);
    Eigen::VectorXd probe = theta;
    auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
        probe[i] += si;
        probe[j] += sj;
        const double value = loss(probe);
        probe[i] = theta[i];
        probe[j] = theta[j];
        return value;
    };

    Eigen::MatrixXd hess(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = step[i];
        probe[i] = theta[i] + hi;
        const double up = loss(probe);
        probe[i] = theta[i] - hi;
        const double down = loss(probe);
        probe[i] = theta[i];
        hess(i, i) = (up - 2.0 * base + down) / (hi * hi);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double hj = step[j];
            const double pp = at(i, hi, j, hj);
            const double pm = at(i, hi, j, -hj);
            const double mp = at(i, -hi, j, hj);
            const double mm = at(i, -hi, j, -hj);
            const double mixed = (pp - pm - mp + mm) / (4.0 * hi * hj);
            hess(i, j) = mixed;
            hess(j, i) = mixed;
        }
    }
    return hess;
}

void require_zero_loss(double loss, Eigen::Index count, double interp_tol,
                       const char* caller) {
    const double budget = interp_tol * interp_tol * static_cast<double>(count);
    if (!(loss <= budget))
        throw Error(ErrorCode::Precondition,
                    std::string(caller) + ": loss " + std::to_string(loss) +
                        " exceeds the zero-set budget " + std::to_string(budget));
}

template <typename Net>
Eigen::MatrixXd gauss_newton_at_zero(const Net& net, const Dataset& data,
                                     double interp_tol) {
    const LossPoint point = loss_and_residuals(net, data);
    require_zero_loss(point.loss, data.count(), interp_tol, "loss_hessian");
    const Eigen::MatrixXd jac = residual_jacobian(net, data);
    return 2.0 * (jac.transpose() * jac);
}

template <typename Net>
SpectrumReport spectrum_impl(const Net& net, const Dataset& data, double interp_tol,
                             double zero_threshold_factor) {
    const LossPoint point = loss_and_residuals(net, data);
    require_zero_loss(point.loss, data.count(), interp_tol, "spectrum_at_minimum");

    SpectrumReport report;
    report.n = net.parameter_count();
    report.d = data.count();
    if (report.n <= report.d)
        throw Error(ErrorCode::Precondition,
                    "spectrum_at_minimum: needs more parameters than data points (n=" +
                        std::to_string(report.n) + ", d=" + std::to_string(report.d) + ")");

    const Eigen::MatrixXd jac = residual_jacobian(net, data);
    const Eigen::MatrixXd gn = 2.0 * (jac.transpose() * jac);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gn);
    if (eig.info() != Eigen::Success)
        throw Error(ErrorCode::Internal, "spectrum_at_minimum: eigendecomposition failed");
    report.eigenvalues = eig.eigenvalues(); // ascending

    const double radius = report.eigenvalues.cwiseAbs().maxCoeff();
    report.zero_threshold = zero_threshold_factor * std::max(radius, 1.0);
    for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
        const double value = report.eigenvalues[i];
        if (value > report.zero_threshold)
            ++report.positive_count;
        else if (value < -report.zero_threshold)
            ++report.negative_count;
        else
            ++report.zero_count;
    }
    // The Gauss-Newton form is positive semidefinite; a certified negative
    // direction means the decomposition (not the landscape) went wrong.
    if (report.negative_count != 0)
        throw Error(ErrorCode::Internal,
                    "spectrum_at_minimum: negative eigenvalue in a Gauss-Newton matrix");

    const Eigen::MatrixXd fd = fd_hessian(make_loss_fn(net, data), point.parameters);
    report.gauss_newton_check = (fd - gn).cwiseAbs().maxCoeff();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& singulars = svd.singularValues();
    report.smallest_jacobian_singular = singulars[singulars.size() - 1];
    const double rank_tol = static_cast<double>(std::max(report.n, report.d)) *
                            Eigen::NumTraits<double>::epsilon() * singulars[0];
    report.jacobian_full_rank = report.smallest_jacobian_singular > rank_tol;
    return report;
}

} // namespace

Eigen::MatrixXd residual_jacobian(const ShallowNet& net, const Dataset& data) {
    const Eigen::Index d = data.count();
    const Eigen::Index h = net.width();
    const Eigen::Index p = net.input_dim();
    if (data.dim() != p)
        throw Error(ErrorCode::Input, "residual_jacobian: dataset dimension mismatch");

    Eigen::MatrixXd jac(d, net.parameter_count());
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::VectorXd x = data.inputs().row(i).transpose();
        const Eigen::VectorXd pre = net.hidden_weights * x - net.hidden_shifts;
        for (Eigen::Index j = 0; j < h; ++j) {
            const double slope = net.act.derivative(pre[j]);
            const double scaled = net.output_weights[j] * slope;
            jac.block(i, j * p, 1, p) = scaled * x.transpose();
            jac(i, h * p + j) = -scaled;           // hidden shift enters as -b_j
            jac(i, h * p + h + j) = net.act(pre[j]); // readout weight
        }
        jac(i, net.parameter_count() - 1) = -1.0; // output shift enters as -b_out
    }
    return jac;
}

Eigen::MatrixXd residual_jacobian(const ComposedNet& net, const Dataset& data) {
    const Eigen::Index d = data.count();
    const Eigen::Index h = net.width();
    const Eigen::Index p = net.input_dim();
    const Eigen::Index chain = static_cast<Eigen::Index>(net.chain.size());
    if (data.dim() != p)
        throw Error(ErrorCode::Input, "residual_jacobian: dataset dimension mismatch");

    Eigen::MatrixXd jac(d, net.parameter_count());
    Eigen::MatrixXd activations(h, chain + 1); // u_0 .. u_chain per sample
    Eigen::MatrixXd preimages(h, chain + 1);   // matching pre-activation values
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::VectorXd x = data.inputs().row(i).transpose();
        preimages.col(0) = net.first_weights * x - net.first_shifts;
        for (Eigen::Index j = 0; j < h; ++j)
            activations(j, 0) = net.act(preimages(j, 0));
        for (Eigen::Index k = 0; k < chain; ++k) {
            preimages.col(k + 1) = net.chain[static_cast<std::size_t>(k)] * activations.col(k);
            for (Eigen::Index j = 0; j < h; ++j)
                activations(j, k + 1) = net.act(preimages(j, k + 1));
        }

        // Reverse sweep from the readout to the first layer.
        Eigen::VectorXd upstream = net.output_weights;
        for (Eigen::Index k = chain; k >= 1; --k) {
            Eigen::VectorXd gate(h);
            for (Eigen::Index j = 0; j < h; ++j)
                gate[j] = net.act.derivative(preimages(j, k));
            const Eigen::VectorXd dpre = upstream.cwiseProduct(gate);
            jac(i, h * p + h + (k - 1)) = dpre.dot(activations.col(k - 1));
            upstream = net.chain[static_cast<std::size_t>(k - 1)] * dpre;
        }
        Eigen::VectorXd gate(h);
        for (Eigen::Index j = 0; j < h; ++j)
            gate[j] = net.act.derivative(preimages(j, 0));
        const Eigen::VectorXd dpre = upstream.cwiseProduct(gate);
        for (Eigen::Index j = 0; j < h; ++j) {
            jac.block(i, j * p, 1, p) = dpre[j] * x.transpose();
            jac(i, h * p + j) = -dpre[j];
        }
        jac.block(i, h * p + h + chain, 1, h) = activations.col(chain).transpose();
    }
    return jac;
}

Eigen::MatrixXd residual_jacobian(const NetModel& net, const Dataset& data) {
    return std::visit([&](const auto& concrete) { return residual_jacobian(concrete, data); },
                      net);
}

Eigen::MatrixXd loss_hessian(const ShallowNet& net, const Dataset& data,
                             HessianMethod method, double interp_tol) {
    if (method == HessianMethod::GaussNewtonAtZero)
        return gauss_newton_at_zero(net, data, interp_tol);
    return fd_hessian(make_loss_fn(net, data), flatten(net));
}

Eigen::MatrixXd loss_hessian(const ComposedNet& net, const Dataset& data,
                             HessianMethod method, double interp_tol) {
    if (method == HessianMethod::GaussNewtonAtZero)
        return gauss_newton_at_zero(net, data, interp_tol);
    return fd_hessian(make_loss_fn(net, data), flatten(net));
}

Eigen::MatrixXd loss_hessian(const NetModel& net, const Dataset& data,
                             HessianMethod method, double interp_tol) {
    return std::visit(
        [&](const auto& concrete) { return loss_hessian(concrete, data, method, interp_tol); },
        net);
}

SpectrumReport spectrum_at_minimum(const ShallowNet& net, const Dataset& data,
                                   double interp_tol, double zero_threshold_factor) {
    return spectrum_impl(net, data, interp_tol, zero_threshold_factor);
}

SpectrumReport spectrum_at_minimum(const ComposedNet& net, const Dataset& data,
                                   double interp_tol, double zero_threshold_factor) {
    return spectrum_impl(net, data, interp_tol, zero_threshold_factor);
}

SpectrumReport spectrum_at_minimum(const NetModel& net, const Dataset& data,
                                   double interp_tol, double zero_threshold_factor) {
    return std::visit(
        [&](const auto& concrete) {
            return spectrum_impl(concrete, data, interp_tol, zero_threshold_factor);
        },
        net);
}

} // namespace interplab
