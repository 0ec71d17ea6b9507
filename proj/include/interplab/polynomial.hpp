#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace interplab::poly {

// Coefficient vectors are ascending: c[k] multiplies t^k.

inline double eval(std::span<const double> c, double t) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;)
        acc = acc * t + c[i];
    return acc;
}

inline std::vector<double> derivative(std::span<const double> c) {
    if (c.size() <= 1)
        return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k)
        d[k - 1] = static_cast<double>(k) * c[k];
    return d;
}

inline int degree(std::span<const double> c, double tol = 0.0) {
    for (std::size_t i = c.size(); i-- > 0;)
        if (std::abs(c[i]) > tol)
            return static_cast<int>(i);
    return 0;
}

inline std::vector<double> multiply(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

// Coefficients of outer(inner(t)), by Horner evaluation in the polynomial
// ring; the result has exactly degree(outer)*degree(inner) slots.
inline std::vector<double> compose(std::span<const double> outer,
                                   std::span<const double> inner) {
    if (outer.empty())
        return {0.0};
    std::vector<double> acc{outer.back()};
    for (std::size_t i = outer.size() - 1; i-- > 0;) {
        acc = multiply(acc, inner);
        acc[0] += outer[i];
    }
    return acc;
}

// Coefficients of c(s * t).
inline std::vector<double> scale_argument(std::span<const double> c, double s) {
    std::vector<double> out(c.begin(), c.end());
    double power = 1.0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        power *= s;
        out[k] *= power;
    }
    return out;
}

} // namespace interplab::poly
