#pragma once

#include <Eigen/Core>
#include <variant>
#include <vector>

#include "interplab/activation.hpp"
#include "interplab/dataset.hpp"

namespace interplab {

// One hidden layer, scalar output:
//   f(x) = v . act(W x - b) - b_out
struct ShallowNet {
    Eigen::MatrixXd hidden_weights; // h x p
    Eigen::VectorXd hidden_shifts;  // h
    Eigen::VectorXd output_weights; // h
    double output_shift = 0.0;
    Activation act = Activation::tanh_act();

    Eigen::Index width() const noexcept { return hidden_weights.rows(); }
    Eigen::Index input_dim() const noexcept { return hidden_weights.cols(); }
    // Flat parameter count: h*p + 2h + 1.
    Eigen::Index parameter_count() const noexcept {
        return width() * input_dim() + 2 * width() + 1;
    }
};

// First layer as in ShallowNet, then a chain of scalar-weight layers applied
// componentwise, then a linear readout:
//   u = act(W1 x - b1);  u <- act(c_k u) for each chain weight;  f(x) = v . u
struct ComposedNet {
    Eigen::MatrixXd first_weights; // h x p
    Eigen::VectorXd first_shifts;  // h
    std::vector<double> chain;     // scalar weight per later hidden layer
    Eigen::VectorXd output_weights; // h
    Activation act = Activation::tanh_act();

    Eigen::Index width() const noexcept { return first_weights.rows(); }
    Eigen::Index input_dim() const noexcept { return first_weights.cols(); }
    // Total layer count including input-side affine layer and readout.
    int depth() const noexcept { return static_cast<int>(chain.size()) + 2; }
    Eigen::Index parameter_count() const noexcept {
        return width() * input_dim() + width() +
               static_cast<Eigen::Index>(chain.size()) + width();
    }
};

using NetModel = std::variant<ShallowNet, ComposedNet>;

double forward(const ShallowNet& net, const Eigen::VectorXd& x);
double forward(const ComposedNet& net, const Eigen::VectorXd& x);
double forward(const NetModel& net, const Eigen::VectorXd& x);

Eigen::VectorXd forward_all(const ShallowNet& net, const Eigen::MatrixXd& inputs);
Eigen::VectorXd forward_all(const ComposedNet& net, const Eigen::MatrixXd& inputs);
Eigen::VectorXd forward_all(const NetModel& net, const Eigen::MatrixXd& inputs);

// Loss surface sample at a parameter vector: residuals r_i = f(x_i) - y_i
// against the dataset's first target column and L = sum r_i^2.
struct LossPoint {
    Eigen::VectorXd parameters;
    Eigen::VectorXd residuals;
    double loss = 0.0;
};

LossPoint loss_and_residuals(const ShallowNet& net, const Dataset& data);
LossPoint loss_and_residuals(const ComposedNet& net, const Dataset& data);
LossPoint loss_and_residuals(const NetModel& net, const Dataset& data);

// Canonical flattening (round-trips with the unflatten functions):
//   shallow:  [W row-major, b, v, b_out]
//   composed: [W1 row-major, b1, chain, v]
Eigen::VectorXd flatten(const ShallowNet& net);
Eigen::VectorXd flatten(const ComposedNet& net);
Eigen::VectorXd flatten(const NetModel& net);

ShallowNet unflatten_shallow(const Eigen::VectorXd& params, Eigen::Index width,
                             Eigen::Index input_dim, Activation act);
ComposedNet unflatten_composed(const Eigen::VectorXd& params, Eigen::Index width,
                               Eigen::Index input_dim, Eigen::Index chain_length,
                               Activation act);

} // namespace interplab
