#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace heatlab {

// Gauss-Legendre nodes/weights on [-1,1] (Newton on the recurrence).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

// Adaptive Gauss-Kronrod 7/15 with an interval worklist. `breaks` adds
// interior split points (peaks the caller knows about).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol = 1e-12,
                 const std::vector<double>& breaks = {});

} // namespace heatlab
