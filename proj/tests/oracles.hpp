#pragma once

// Independent closed-form oracles used by the tests. These never call into
// the series machinery they check.

#include <cmath>

namespace oracles {

constexpr double kPi = 3.14159265358979323846;

// centered 1D Gaussian density of variance t
inline double gauss(double u, double t) {
    return std::exp(-u * u / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

// Dirichlet heat kernel of the half-line (0, inf) by reflection
inline double half_line_kernel(double t, double a, double b) {
    return gauss(a - b, t) - gauss(a + b, t);
}

// half-plane {x2 > 0}: free kernel in x1 times a reflected kernel in x2
inline double half_plane_kernel(double t, double x1, double x2, double y1, double y2) {
    return gauss(x1 - y1, t) * half_line_kernel(t, x2, y2);
}

// quarter-plane {x1 > 0, x2 > 0}: product of two half-line kernels
inline double quarter_plane_kernel(double t, double x1, double x2, double y1, double y2) {
    return half_line_kernel(t, x1, y1) * half_line_kernel(t, x2, y2);
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// half-line survival from height h
inline double half_line_survival(double h, double t) {
    return 2.0 * std_normal_cdf(h / std::sqrt(t)) - 1.0;
}

} // namespace oracles
