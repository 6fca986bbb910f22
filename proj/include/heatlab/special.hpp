#pragma once

#include <vector>

namespace heatlab {

// Regularized lower incomplete gamma P(a,x) = gamma(a,x)/Gamma(a).
double gamma_p(double a, double x);

// Standard normal CDF and density.
double normal_cdf(double x);
double normal_pdf(double x);

// Kolmogorov-Smirnov: sup |F_emp - F| for sorted model CDF values of the
// sample, and the one-sample critical value c(alpha)/sqrt(n).
double ks_statistic(std::vector<double> model_cdf_values);
double ks_critical(double alpha, std::size_t n);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace heatlab
