#pragma once

#include "heatlab/spectral.hpp"

namespace heatlab {

// Closed-form machinery on a cone with vertex: the Bessel-series heat
// kernel, the minimal harmonic function v, the truncated-cone harmonic w,
// the survival constant gamma_V, and the Yaglom limit density.
//
// Glossary note: the paper writes J_nu for the modified Bessel function of
// the first kind; this code uses the standard name I_nu throughout.

struct ConeKernelSpec {
    SpectralData spectral;
    Vec vertex{0, 0, 0};
    int max_terms = 512;      // series truncation cap K
    double tolerance = 1e-10; // absolute tolerance on kernel values

    ConeKernelSpec() = default;
    ConeKernelSpec(SpectralData spec, Vec vertex_, int max_terms_, double tolerance_);

    // truncation-bound table: characters, lgamma(1+alpha), sup|m|^2,
    // extended past the computed spectrum for tail estimates
    std::vector<double> bound_alpha, bound_lgamma, bound_supm2;
};

struct KernelValue {
    double value = 0.0;
    double tail_bound = 0.0; // rigorous bound on the truncated remainder
    int terms = 0;
};

// Dirichlet heat kernel p^V(t,x,y) on the cone, truncated so the reported
// tail bound is <= spec.tolerance. Throws if x or y lies outside the closed
// cone, or if the bound cannot be met within spec.max_terms.
KernelValue cone_heat_kernel(const ConeKernelSpec& spec, double t, const Vec& x, const Vec& y);

// v(x) = |x-a|^kappa m^1(theta): the minimal positive harmonic function
// vanishing on the cone boundary. Zero on the boundary, throws outside.
double minimal_harmonic_v(const SpectralData& spec, const Vec& x, const Vec& vertex = {});

// w(x) = v(x) - E_x v(B_{T^C}) for the cone truncated at radius R. The exit
// expectation is the bounded harmonic extension of v|_base, which separates:
// w(x) = (r^kappa - R^{2 alpha} r^{kappa - 2 alpha}) m^1(theta).
double truncated_harmonic_w(const SpectralData& spec, double R, const Vec& x,
                            const Vec& vertex = {});

// gamma_V = Gamma((kappa+n)/2) / (2^{kappa/2} Gamma(kappa+n/2)) * int m^1 dsigma
double gamma_v(const SpectralData& spec);

struct SurvivalValue {
    double value = 0.0;
    double error = 0.0; // quadrature + series tail estimate
    int terms = 0;
};

// P_x(T^V > t) by term-wise quadrature of the kernel series.
SurvivalValue cone_survival_series(const ConeKernelSpec& spec, double t, const Vec& x);

// Yaglom limit density v(y) e^{-|y|^2/2} / (gamma_V 2^alpha Gamma(1+alpha));
// integrates to 1 over the cone.
double yaglom_density_cone(const SpectralData& spec, const Vec& y);

// radial CDF of the Yaglom limit: regularized incomplete gamma of order
// (kappa+n)/2 at rho^2/2
double yaglom_radial_cdf(const SpectralData& spec, double rho);

} // namespace heatlab
