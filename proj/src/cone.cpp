#include "heatlab/cone.hpp"

#include <algorithm>
#include <cmath>

#include "heatlab/bessel.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/special.hpp"

namespace heatlab {

namespace {

struct Polar {
    double r = 0.0;
    double u = 0.0;
    bool boundary = false;
};

// polar coordinates relative to the cone; throws outside the closed cone
Polar cone_polar(const SpectralData& spec, const Vec& x, const Vec& vertex) {
    Polar p;
    Vec d = x - vertex;
    p.r = d.norm();
    if (p.r < 1e-300) {
        p.boundary = true; // the vertex itself
        return p;
    }
    p.u = spec.opening.coordinate(d * (1.0 / p.r));
    const double L = spec.width();
    const double edge_tol = 1e-12;
    if (p.u <= edge_tol || std::fabs(p.u - L) <= edge_tol ||
        (spec.opening.kind == Opening::Kind::Arc && p.u >= 2.0 * 3.14159265358979323846 - edge_tol)) {
        p.boundary = true;
        p.u = std::clamp(p.u, 0.0, L);
        return p;
    }
    if (p.u > L) throw Error("cone: point outside the closed cone");
    return p;
}

} // namespace

ConeKernelSpec::ConeKernelSpec(SpectralData spec, Vec vertex_, int max_terms_, double tolerance_)
    : spectral(std::move(spec)), vertex(vertex_), max_terms(max_terms_), tolerance(tolerance_) {
    if (max_terms < 1) throw Error("kernel spec: K must be >= 1");
    if (max_terms > 10000) throw Error("kernel spec: K exceeds supported series length (10^4)");
    if (!(tolerance > 0.0)) throw Error("kernel spec: tolerance must be positive");

    // bound table: exact characters for an arc, spacing-extrapolated beyond
    // the computed spectrum for a cap
    const int n_bound = std::max(4 * max_terms, max_terms + 4000);
    const auto& chars = spectral.characters;
    double spacing = 1.0;
    if (spectral.opening.kind == Opening::Kind::Arc)
        spacing = 3.14159265358979323846 / spectral.width();
    else if (spectral.count >= 2)
        spacing = 0.9 * (chars[spectral.count - 1] - chars[spectral.count - 2]);
    spacing = std::max(spacing, 0.3);

    double supm2_max = 0.0;
    for (double s : spectral.sup_abs) supm2_max = std::max(supm2_max, s * s);

    bound_alpha.reserve(n_bound);
    bound_lgamma.reserve(n_bound);
    bound_supm2.reserve(n_bound);
    for (int j = 0; j < n_bound; ++j) {
        double a;
        if (j < spectral.count)
            a = chars[j];
        else if (spectral.opening.kind == Opening::Kind::Arc)
            a = (j + 1) * spacing;
        else
            a = chars[spectral.count - 1] + (j + 1 - spectral.count) * spacing;
        bound_alpha.push_back(a);
        bound_lgamma.push_back(std::lgamma(1.0 + a));
        bound_supm2.push_back(j < spectral.count ? spectral.sup_abs[j] * spectral.sup_abs[j]
                                                 : supm2_max);
    }
}

namespace {

// per-term truncation bound (without the kernel prefactor)
double term_bound(const ConeKernelSpec& spec, int j, double z) {
    double a = spec.bound_alpha[j];
    double b = bessel_i_scaled_upper(a, z);
    return b * spec.bound_supm2[j];
}

// number of terms needed so that the remainder past them is <= tol/pref;
// also reports the achieved suffix bound. Returns -1 when max_terms can
// not meet the tolerance (required stored in *required).
int plan_terms(const ConeKernelSpec& spec, double z, double tol_over_pref, double& tail,
               int* required) {
    const int n = static_cast<int>(spec.bound_alpha.size());
    std::vector<double> b(n);
    int last = n;
    for (int j = 0; j < n; ++j) {
        b[j] = term_bound(spec, j, z);
        if (j > 3 && b[j] < tol_over_pref * 1e-6 && b[j] < b[j - 1]) {
            last = j + 1;
            break;
        }
    }
    if (last == n && b[n - 1] >= tol_over_pref * 1e-6) {
        if (required) *required = n;
        return -1;
    }
    // close the remainder geometrically from the last computed ratio
    double rest = 0.0;
    if (last < n) {
        // b[last-1] was tiny and decreasing; bound the rest by a geometric series
        double q = b[last - 1] / std::max(b[last - 2], 1e-300);
        if (q < 0.9) rest = b[last - 1] * q / (1.0 - q);
        else rest = b[last - 1] * 10.0; // never reached with the 1e-6 margin
    }
    double suffix = rest;
    int k = last;
    while (k > 0 && suffix + b[k - 1] <= tol_over_pref) suffix += b[--k];
    // k terms kept, suffix = bound on the rest
    if (k > spec.max_terms || k > spec.spectral.count) {
        if (required) *required = k;
        return -1;
    }
    tail = suffix;
    return k;
}

} // namespace

KernelValue cone_heat_kernel(const ConeKernelSpec& spec, double t, const Vec& x, const Vec& y) {
    if (!(t > 0.0)) throw Error("cone_heat_kernel: requires t > 0");
    Polar px = cone_polar(spec.spectral, x, spec.vertex);
    Polar py = cone_polar(spec.spectral, y, spec.vertex);
    KernelValue out;
    if (px.boundary || py.boundary) return out;

    const int n = spec.spectral.dim;
    const double r = px.r, rho = py.r;
    const double z = r * rho / t;
    const double pref =
        std::exp(-(r - rho) * (r - rho) / (2.0 * t)) / (t * std::pow(r * rho, 0.5 * n - 1.0));

    double tail = 0.0;
    int required = 0;
    int k = plan_terms(spec, z, spec.tolerance / pref, tail, &required);
    if (k < 0)
        throw Error("cone_heat_kernel: tail bound needs " + std::to_string(required) +
                    " terms (cap " + std::to_string(std::min(spec.max_terms, spec.spectral.count)) +
                    ")");

    std::vector<double> orders(spec.spectral.characters.begin(),
                               spec.spectral.characters.begin() + k);
    std::vector<double> bessel;
    bessel_i_scaled_many(orders, z, bessel);

    double sum = 0.0;
    for (int i = 0; i < k; ++i)
        sum += bessel[i] * (spec.spectral.eigenfunction(i + 1, px.u) *
                            spec.spectral.eigenfunction(i + 1, py.u));

    out.value = pref * sum;
    out.tail_bound = pref * tail;
    out.terms = k;
    return out;
}

double minimal_harmonic_v(const SpectralData& spec, const Vec& x, const Vec& vertex) {
    Polar p = cone_polar(spec, x, vertex);
    if (p.boundary) return 0.0;
    return std::pow(p.r, spec.kappa) * spec.eigenfunction(1, p.u);
}

double truncated_harmonic_w(const SpectralData& spec, double R, const Vec& x, const Vec& vertex) {
    if (!(R > 0.0)) throw Error("truncated_harmonic_w: R must be positive");
    Polar p = cone_polar(spec, x, vertex);
    if (p.r < R - 1e-12) throw Error("truncated_harmonic_w: point inside the truncation ball");
    if (p.boundary || p.r <= R) return 0.0;
    double ratio = std::pow(R / p.r, 2.0 * spec.alpha);
    return std::pow(p.r, spec.kappa) * (1.0 - ratio) * spec.eigenfunction(1, p.u);
}

double gamma_v(const SpectralData& spec) {
    const double k = spec.kappa, n = spec.dim;
    double ln = std::lgamma(0.5 * (k + n)) - 0.5 * k * std::log(2.0) - std::lgamma(k + 0.5 * n);
    return std::exp(ln) * spec.first_integral();
}

SurvivalValue cone_survival_series(const ConeKernelSpec& spec, double t, const Vec& x) {
    if (!(t > 0.0)) throw Error("cone_survival_series: requires t > 0");
    Polar px = cone_polar(spec.spectral, x, spec.vertex);
    SurvivalValue out;
    if (px.boundary) return out;

    const auto& sp = spec.spectral;
    const int n = sp.dim;
    const double r = px.r;
    const double sig = std::sqrt(t);
    const double r_hi = r + 12.0 * sig;
    const double r_lo = std::max(0.0, r - 12.0 * sig);

    // sigma(D)^(1/2) * sup|m| bounds the angular coefficients of the tail
    double supm_max = 0.0;
    for (double s : sp.sup_abs) supm_max = std::max(supm_max, s);
    const double coeff_bound = std::sqrt(sp.opening.surface_measure()) * supm_max;

    const double tol = 1e-9;
    const double scale = t * std::pow(r, 0.5 * n - 1.0);
    double sum = 0.0, quad_err = 0.0;
    double prev_R = 0.0;
    int i = 0;
    for (; i < std::min(spec.max_terms, sp.count); ++i) {
        const double a = sp.characters[i];
        auto radial = [&](double rho) {
            if (rho <= 0.0) return 0.0;
            double g = std::exp(-(r - rho) * (r - rho) / (2.0 * t));
            return std::pow(rho, 0.5 * n) * g * bessel_i_scaled(a, r * rho / t);
        };
        double coeff = std::max(std::fabs(sp.first_integrals[i]) * sp.sup_abs[i], 1e-12);
        double quad_tol = tol * scale / (coeff * (i + 1.0) * (i + 2.0));
        double R_i = integrate(radial, r_lo, r_hi, quad_tol, 1e-11, {r}) / scale;
        quad_err += quad_tol * coeff / scale;
        sum += sp.first_integrals[i] * sp.eigenfunction(i + 1, px.u) * R_i;

        // R_i decreases strictly in i (I_nu decreases in nu); once the
        // coefficient-bounded tail is geometrically small we stop
        if (i >= 1 && R_i > 0.0 && prev_R > 0.0) {
            double q = R_i / prev_R;
            if (q < 0.95) {
                double tail = coeff_bound * R_i * q / (1.0 - q);
                if (tail < tol) {
                    out.error = tail + quad_err;
                    ++i;
                    break;
                }
            }
        }
        prev_R = R_i;
    }
    if (out.error == 0.0)
        throw Error("cone_survival_series: series tail not resolved within " +
                    std::to_string(i) + " terms (last term bound " +
                    std::to_string(coeff_bound * prev_R) + ")");
    out.value = std::clamp(sum, 0.0, 1.0);
    out.terms = i;
    return out;
}

double yaglom_density_cone(const SpectralData& spec, const Vec& y) {
    double v = minimal_harmonic_v(spec, y);
    if (v == 0.0) return 0.0;
    double norm = gamma_v(spec) * std::exp(spec.alpha * std::log(2.0) + std::lgamma(1.0 + spec.alpha));
    return v * std::exp(-0.5 * y.norm2()) / norm;
}

double yaglom_radial_cdf(const SpectralData& spec, double rho) {
    if (rho <= 0.0) return 0.0;
    return gamma_p(0.5 * (spec.kappa + spec.dim), 0.5 * rho * rho);
}

} // namespace heatlab
