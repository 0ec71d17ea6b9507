#include "interplab/activation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <utility>

#include "interplab/errors.hpp"
#include "interplab/polynomial.hpp"

namespace interplab {

namespace {

// Invariant guard: a polynomial activation's evaluator must agree with its
// coefficient vector. Cheap (one pass over a fixed grid) and run once per
// construction.
void check_poly_consistency(const std::function<double(double)>& eval,
                            const std::vector<double>& coeffs) {
    double scale = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double t = -4.0 + 8.0 * i / 63.0;
        scale = std::max(scale, std::abs(poly::eval(coeffs, t)));
    }
    const double tol = 1e-12 * std::max(scale, 1.0);
    for (int i = 0; i < 64; ++i) {
        const double t = -4.0 + 8.0 * i / 63.0;
        if (std::abs(eval(t) - poly::eval(coeffs, t)) > tol)
            throw Error(ErrorCode::Internal,
                        "polynomial activation evaluator disagrees with its coefficients");
    }
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    std::string item;
    std::istringstream stream{std::string(text)};
    while (std::getline(stream, item, ',')) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &used);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Input, "bad coefficient '" + item + "'");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
            ++used;
        if (used != item.size())
            throw Error(ErrorCode::Input, "bad coefficient '" + item + "'");
        out.push_back(value);
    }
    if (out.empty())
        throw Error(ErrorCode::Input, "empty coefficient list");
    return out;
}

} // namespace

Activation::Activation(ActivationKind kind, bool smooth, std::string spec,
                       std::function<double(double)> eval,
                       std::function<double(double)> deriv,
                       std::optional<std::vector<double>> coeffs)
    : kind_(kind),
      smooth_(smooth),
      spec_(std::move(spec)),
      eval_(std::move(eval)),
      deriv_(std::move(deriv)),
      coeffs_(std::move(coeffs)) {
    if (coeffs_)
        check_poly_consistency(eval_, *coeffs_);
}

Activation Activation::tanh_act() {
    return Activation(
        ActivationKind::Builtin, true, "tanh",
        [](double t) { return std::tanh(t); },
        [](double t) {
            const double y = std::tanh(t);
            return 1.0 - y * y;
        },
        std::nullopt);
}

Activation Activation::relu() {
    return Activation(
        ActivationKind::Builtin, false, "relu",
        [](double t) { return t > 0.0 ? t : 0.0; }, nullptr, std::nullopt);
}

Activation Activation::sigmoid() {
    auto sig = [](double t) {
        // Split at zero to avoid overflow in exp for large |t|.
        if (t >= 0.0)
            return 1.0 / (1.0 + std::exp(-t));
        const double e = std::exp(t);
        return e / (1.0 + e);
    };
    return Activation(
        ActivationKind::Builtin, true, "sigmoid", sig,
        [sig](double t) {
            const double y = sig(t);
            return y * (1.0 - y);
        },
        std::nullopt);
}

Activation Activation::polynomial(std::vector<double> ascending_coeffs) {
    if (ascending_coeffs.empty())
        throw Error(ErrorCode::Input, "polynomial activation needs at least one coefficient");
    for (double c : ascending_coeffs)
        if (!std::isfinite(c))
            throw Error(ErrorCode::Input, "polynomial coefficients must be finite");
    std::ostringstream spec;
    spec << "poly:";
    for (std::size_t i = 0; i < ascending_coeffs.size(); ++i)
        spec << (i ? "," : "") << ascending_coeffs[i];
    auto coeffs = ascending_coeffs;
    auto deriv_coeffs = poly::derivative(coeffs);
    return Activation(
        ActivationKind::Polynomial, true, spec.str(),
        [coeffs](double t) { return poly::eval(coeffs, t); },
        [deriv_coeffs](double t) { return poly::eval(deriv_coeffs, t); },
        std::move(ascending_coeffs));
}

Activation Activation::tabulated(std::vector<double> points, std::vector<double> values) {
    if (points.size() != values.size() || points.size() < 2)
        throw Error(ErrorCode::Input, "tabulated activation needs >= 2 matched samples");
    if (!std::is_sorted(points.begin(), points.end()))
        throw Error(ErrorCode::Input, "tabulated activation points must be sorted");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i] == points[i - 1])
            throw Error(ErrorCode::Input, "tabulated activation points must be distinct");
    for (std::size_t i = 0; i < points.size(); ++i)
        if (!std::isfinite(points[i]) || !std::isfinite(values[i]))
            throw Error(ErrorCode::Input, "tabulated activation samples must be finite");
    auto ts = std::make_shared<std::vector<double>>(std::move(points));
    auto ys = std::make_shared<std::vector<double>>(std::move(values));
    Activation act(
        ActivationKind::Tabulated, false, "table",
        [ts, ys](double t) {
            const auto& x = *ts;
            const auto& y = *ys;
            if (t <= x.front())
                return y.front();
            if (t >= x.back())
                return y.back();
            const auto it = std::upper_bound(x.begin(), x.end(), t);
            const std::size_t hi = static_cast<std::size_t>(it - x.begin());
            const std::size_t lo = hi - 1;
            const double w = (t - x[lo]) / (x[hi] - x[lo]);
            return y[lo] + w * (y[hi] - y[lo]);
        },
        nullptr, std::nullopt);
    act.table_.emplace(*ts, *ys);
    return act;
}

Activation Activation::from_spec(std::string_view spec) {
    if (spec == "tanh")
        return tanh_act();
    if (spec == "relu")
        return relu();
    if (spec == "sigmoid")
        return sigmoid();
    if (spec.starts_with("poly:"))
        return polynomial(parse_number_list(spec.substr(5)));
    if (spec.starts_with("table:")) {
        const std::string path(spec.substr(6));
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::Input, "cannot open activation table '" + path + "'");
        std::vector<double> ts, ys;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            std::istringstream row(line);
            std::string a, b;
            if (!std::getline(row, a, ',') || !std::getline(row, b))
                throw Error(ErrorCode::Input, "activation table rows must be 't,value'");
            try {
                ts.push_back(std::stod(a));
                ys.push_back(std::stod(b));
            } catch (const std::exception&) {
                throw Error(ErrorCode::Input, "bad activation table row '" + line + "'");
            }
        }
        return tabulated(std::move(ts), std::move(ys));
    }
    throw Error(ErrorCode::Input,
                "unknown activation spec '" + std::string(spec) +
                    "' (expected tanh|relu|sigmoid|poly:...|table:path)");
}

double Activation::derivative(double t) const {
    if (!deriv_)
        throw Error(ErrorCode::Unsupported,
                    "activation '" + spec_ + "' has no derivative (not smooth)");
    return deriv_(t);
}

const std::vector<double>& Activation::poly_coeffs() const {
    if (!coeffs_)
        throw Error(ErrorCode::Precondition,
                    "activation '" + spec_ + "' has no polynomial coefficients");
    return *coeffs_;
}

int Activation::poly_degree() const { return poly::degree(poly_coeffs()); }

const std::vector<double>& Activation::table_points() const {
    if (!table_)
        throw Error(ErrorCode::Precondition, "activation '" + spec_ + "' has no sample table");
    return table_->first;
}

const std::vector<double>& Activation::table_values() const {
    if (!table_)
        throw Error(ErrorCode::Precondition, "activation '" + spec_ + "' has no sample table");
    return table_->second;
}

} // namespace interplab
