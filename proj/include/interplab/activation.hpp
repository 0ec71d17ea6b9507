#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace interplab {

enum class ActivationKind { Builtin, Polynomial, Tabulated };

// Scalar activation with optional exact-polynomial structure. Instances are
// immutable after construction and safe to share across threads.
class Activation {
  public:
    static Activation tanh_act();
    static Activation relu();
    static Activation sigmoid();
    static Activation polynomial(std::vector<double> ascending_coeffs);

    // Piecewise-linear interpolation through sorted sample points; constant
    // extrapolation beyond the table. Not smooth.
    static Activation tabulated(std::vector<double> points, std::vector<double> values);

    // Parses "tanh" | "relu" | "sigmoid" | "poly:c0,c1,..." | "table:path".
    // Table files are CSV rows "t,value".
    static Activation from_spec(std::string_view spec);

    double operator()(double t) const { return eval_(t); }

    // First derivative; throws Unsupported when the activation is not smooth.
    double derivative(double t) const;

    ActivationKind kind() const noexcept { return kind_; }
    bool smooth() const noexcept { return smooth_; }
    const std::string& spec_string() const noexcept { return spec_; }

    bool is_polynomial() const noexcept { return coeffs_.has_value(); }
    // Exact ascending coefficients; only present for polynomial activations.
    const std::vector<double>& poly_coeffs() const;
    int poly_degree() const;

    bool has_table() const noexcept { return table_.has_value(); }
    // Sample grid of a tabulated activation; only present for tabulated ones.
    const std::vector<double>& table_points() const;
    const std::vector<double>& table_values() const;

  private:
    Activation(ActivationKind kind, bool smooth, std::string spec,
               std::function<double(double)> eval,
               std::function<double(double)> deriv,
               std::optional<std::vector<double>> coeffs);

    ActivationKind kind_;
    bool smooth_;
    std::string spec_;
    std::function<double(double)> eval_;
    std::function<double(double)> deriv_;
    std::optional<std::vector<double>> coeffs_;
    std::optional<std::pair<std::vector<double>, std::vector<double>>> table_;
};

} // namespace interplab
