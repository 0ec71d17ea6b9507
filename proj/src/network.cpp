#include "interplab/network.hpp"

#include "interplab/errors.hpp"

namespace interplab {

namespace {

void check_shapes(const ShallowNet& net) {
    if (net.hidden_shifts.size() != net.width() ||
        net.output_weights.size() != net.width())
        throw Error(ErrorCode::Internal, "shallow net parameter shapes disagree");
}

void check_shapes(const ComposedNet& net) {
    if (net.first_shifts.size() != net.width() ||
        net.output_weights.size() != net.width())
        throw Error(ErrorCode::Internal, "composed net parameter shapes disagree");
}

} // namespace

double forward(const ShallowNet& net, const Eigen::VectorXd& x) {
    check_shapes(net);
    if (x.size() != net.input_dim())
        throw Error(ErrorCode::Input, "input dimension mismatch");
    Eigen::VectorXd pre = net.hidden_weights * x - net.hidden_shifts;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < pre.size(); ++j)
        acc += net.output_weights[j] * net.act(pre[j]);
    return acc - net.output_shift;
}

double forward(const ComposedNet& net, const Eigen::VectorXd& x) {
    check_shapes(net);
    if (x.size() != net.input_dim())
        throw Error(ErrorCode::Input, "input dimension mismatch");
    Eigen::VectorXd u = net.first_weights * x - net.first_shifts;
    for (Eigen::Index j = 0; j < u.size(); ++j)
        u[j] = net.act(u[j]);
    for (double c : net.chain)
        for (Eigen::Index j = 0; j < u.size(); ++j)
            u[j] = net.act(c * u[j]);
    return net.output_weights.dot(u);
}

double forward(const NetModel& net, const Eigen::VectorXd& x) {
    return std::visit([&x](const auto& n) { return forward(n, x); }, net);
}

namespace {

template <typename Net>
Eigen::VectorXd forward_rows(const Net& net, const Eigen::MatrixXd& inputs) {
    Eigen::VectorXd out(inputs.rows());
    for (Eigen::Index i = 0; i < inputs.rows(); ++i)
        out[i] = forward(net, Eigen::VectorXd(inputs.row(i).transpose()));
    return out;
}

} // namespace

Eigen::VectorXd forward_all(const ShallowNet& net, const Eigen::MatrixXd& inputs) {
    return forward_rows(net, inputs);
}

Eigen::VectorXd forward_all(const ComposedNet& net, const Eigen::MatrixXd& inputs) {
    return forward_rows(net, inputs);
}

Eigen::VectorXd forward_all(const NetModel& net, const Eigen::MatrixXd& inputs) {
    return std::visit([&inputs](const auto& n) { return forward_rows(n, inputs); }, net);
}

namespace {

template <typename Net>
LossPoint loss_impl(const Net& net, const Dataset& data) {
    if (data.dim() != net.input_dim())
        throw Error(ErrorCode::Input, "dataset dimension does not match net input");
    LossPoint point;
    point.parameters = flatten(net);
    point.residuals = forward_all(net, data.inputs()) - data.target_column(0);
    point.loss = point.residuals.squaredNorm();
    return point;
}

} // namespace

LossPoint loss_and_residuals(const ShallowNet& net, const Dataset& data) {
    return loss_impl(net, data);
}

LossPoint loss_and_residuals(const ComposedNet& net, const Dataset& data) {
    return loss_impl(net, data);
}

LossPoint loss_and_residuals(const NetModel& net, const Dataset& data) {
    return std::visit([&data](const auto& n) { return loss_impl(n, data); }, net);
}

Eigen::VectorXd flatten(const ShallowNet& net) {
    check_shapes(net);
    Eigen::VectorXd params(net.parameter_count());
    Eigen::Index at = 0;
    for (Eigen::Index j = 0; j < net.width(); ++j)
        for (Eigen::Index k = 0; k < net.input_dim(); ++k)
            params[at++] = net.hidden_weights(j, k);
    params.segment(at, net.width()) = net.hidden_shifts;
    at += net.width();
    params.segment(at, net.width()) = net.output_weights;
    at += net.width();
    params[at] = net.output_shift;
    return params;
}

Eigen::VectorXd flatten(const ComposedNet& net) {
    check_shapes(net);
    Eigen::VectorXd params(net.parameter_count());
    Eigen::Index at = 0;
    for (Eigen::Index j = 0; j < net.width(); ++j)
        for (Eigen::Index k = 0; k < net.input_dim(); ++k)
            params[at++] = net.first_weights(j, k);
    params.segment(at, net.width()) = net.first_shifts;
    at += net.width();
    for (double c : net.chain)
        params[at++] = c;
    params.segment(at, net.width()) = net.output_weights;
    return params;
}

Eigen::VectorXd flatten(const NetModel& net) {
    return std::visit([](const auto& n) { return flatten(n); }, net);
}

ShallowNet unflatten_shallow(const Eigen::VectorXd& params, Eigen::Index width,
                             Eigen::Index input_dim, Activation act) {
    const Eigen::Index expected = width * input_dim + 2 * width + 1;
    if (params.size() != expected)
        throw Error(ErrorCode::Input, "parameter vector has wrong length");
    ShallowNet net{Eigen::MatrixXd(width, input_dim), Eigen::VectorXd(width),
                   Eigen::VectorXd(width), 0.0, std::move(act)};
    Eigen::Index at = 0;
    for (Eigen::Index j = 0; j < width; ++j)
        for (Eigen::Index k = 0; k < input_dim; ++k)
            net.hidden_weights(j, k) = params[at++];
    net.hidden_shifts = params.segment(at, width);
    at += width;
    net.output_weights = params.segment(at, width);
    at += width;
    net.output_shift = params[at];
    return net;
}

ComposedNet unflatten_composed(const Eigen::VectorXd& params, Eigen::Index width,
                               Eigen::Index input_dim, Eigen::Index chain_length,
                               Activation act) {
    const Eigen::Index expected = width * input_dim + 2 * width + chain_length;
    if (params.size() != expected)
        throw Error(ErrorCode::Input, "parameter vector has wrong length");
    ComposedNet net{Eigen::MatrixXd(width, input_dim), Eigen::VectorXd(width),
                    std::vector<double>(static_cast<std::size_t>(chain_length)),
                    Eigen::VectorXd(width), std::move(act)};
    Eigen::Index at = 0;
    for (Eigen::Index j = 0; j < width; ++j)
        for (Eigen::Index k = 0; k < input_dim; ++k)
            net.first_weights(j, k) = params[at++];
    net.first_shifts = params.segment(at, width);
    at += width;
    for (Eigen::Index c = 0; c < chain_length; ++c)
        net.chain[static_cast<std::size_t>(c)] = params[at++];
    net.output_weights = params.segment(at, width);
    return net;
}

} // namespace interplab
