#include <doctest.h>

#include <cmath>

#include "heatlab/cone.hpp"
#include "heatlab/quadrature.hpp"
#include "oracles.hpp"

using namespace heatlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

ConeKernelSpec half_plane_spec(int k = 128, double tol = 1e-14) {
    return {spectrum(Opening::arc(0, kPi), k), {0, 0, 0}, k, tol};
}
ConeKernelSpec quarter_plane_spec(int k = 128, double tol = 1e-14) {
    return {spectrum(Opening::arc(0, kPi / 2), k), {0, 0, 0}, k, tol};
}
} // namespace

TEST_CASE("half-plane kernel equals the reflection-principle kernel") {
    auto ks = half_plane_spec();
    for (double t : {0.25, 1.0, 4.0})
        for (double a = 0.25; a <= 0.85; a += 0.15)
            for (double r = 0.6; r <= 3.0; r += 0.6) {
                Vec x{r * std::cos(a * kPi) * 0.8, r * std::sin(a * kPi) * 0.8};
                Vec y{r * std::cos((1.1 - a) * kPi) * 0.9, r * std::sin((1.1 - a) * kPi) * 0.9};
                double oracle = oracles::half_plane_kernel(t, x.x, x.y, y.x, y.y);
                auto kv = cone_heat_kernel(ks, t, x, y);
                CHECK(kv.value == doctest::Approx(oracle).epsilon(1e-7));
            }
    // frozen spot value: p(1,(0,1),(0,1)) = (1 - e^{-2})/(2 pi)
    auto kv = cone_heat_kernel(ks, 1.0, {0, 1}, {0, 1});
    CHECK(kv.value == doctest::Approx((1 - std::exp(-2.0)) / (2 * kPi)).epsilon(1e-10));
    CHECK(kv.tail_bound <= 1e-12);
}

TEST_CASE("quarter-plane kernel equals the product of half-line kernels") {
    auto ks = quarter_plane_spec();
    for (double x1 : {0.4, 1.1, 2.0})
        for (double x2 : {0.5, 1.4})
            for (double y1 : {0.6, 1.8})
                for (double y2 : {0.4, 2.1}) {
                    double oracle = oracles::quarter_plane_kernel(0.5, x1, x2, y1, y2);
                    auto kv = cone_heat_kernel(ks, 0.5, {x1, x2}, {y1, y2});
                    CHECK(kv.value == doctest::Approx(oracle).epsilon(1e-8));
                }
}

TEST_CASE("kernel symmetry is bit exact") {
    auto ks = quarter_plane_spec();
    Vec x{0.7, 1.9}, y{2.2, 0.4};
    for (double t : {0.3, 2.0, 50.0}) {
        auto a = cone_heat_kernel(ks, t, x, y);
        auto b = cone_heat_kernel(ks, t, y, x);
        CHECK(a.value == b.value); // bitwise
        CHECK(a.terms == b.terms);
    }
    // 3D cap case as well
    ConeKernelSpec kc(spectrum(Opening::cap(kPi / 2), 12), {0, 0, 0}, 12, 1e-10);
    Vec u{0.3, 0.1, 1.2}, v{-0.4, 0.2, 0.9};
    auto a = cone_heat_kernel(kc, 1.5, u, v);
    auto b = cone_heat_kernel(kc, 1.5, v, u);
    CHECK(a.value == b.value);
    CHECK(a.value > 0.0);
}

TEST_CASE("kernel vanishes on the boundary and rejects exterior points") {
    auto ks = half_plane_spec();
    CHECK(cone_heat_kernel(ks, 1.0, {1, 0}, {0, 1}).value == 0.0);
    CHECK_THROWS_AS(cone_heat_kernel(ks, 1.0, {0, -1}, {0, 1}), Error);
    CHECK_THROWS_AS(cone_heat_kernel(ks, 0.0, {0, 1}, {0, 1}), Error);
}

TEST_CASE("kernel scaling identity") {
    auto ks = quarter_plane_spec();
    Vec x{0.8, 1.2}, y{1.5, 0.7};
    const double t = 0.8;
    double base = cone_heat_kernel(ks, t, x, y).value;
    for (double lam : {0.5, 2.0, 10.0}) {
        double scaled =
            cone_heat_kernel(ks, t / (lam * lam), x * (1.0 / lam), y * (1.0 / lam)).value;
        CHECK(base == doctest::Approx(scaled / std::pow(lam, 2)).epsilon(1e-9));
    }
}

TEST_CASE("t -> p(t,x,x) is nonincreasing") {
    auto ks = half_plane_spec();
    Vec x{0.4, 1.3};
    double prev = 1e300;
    for (double t = 0.05; t < 2000.0; t *= 2.0) {
        double v = cone_heat_kernel(ks, t, x, x).value;
        CHECK(v <= prev * (1.0 + 1e-12));
        prev = v;
    }
}

TEST_CASE("ratio p(t+s)/p(t) tends to one") {
    auto ks = half_plane_spec();
    Vec x{0, 1}, y{1, 1};
    double a = cone_heat_kernel(ks, 1e4 + 1.0, x, y).value;
    double b = cone_heat_kernel(ks, 1e4, x, y).value;
    CHECK(std::fabs(a / b - 1.0) <= 1e-3);
}

TEST_CASE("Chapman-Kolmogorov by quadrature") {
    auto check = [](const ConeKernelSpec& ks, Vec x, Vec y) {
        const double s = 0.5, t = 0.5;
        double direct = cone_heat_kernel(ks, s + t, x, y).value;
        double L = ks.spectral.width();
        double a0 = ks.spectral.opening.theta_a;
        auto inner = [&](double ang) {
            Vec dir{std::cos(a0 + ang), std::sin(a0 + ang)};
            return integrate(
                [&](double r) {
                    Vec z = dir * r;
                    return r * cone_heat_kernel(ks, s, x, z).value *
                           cone_heat_kernel(ks, t, z, y).value;
                },
                1e-6, 8.0, 1e-9, 1e-9, {x.norm(), y.norm()});
        };
        double ck = integrate(inner, 1e-6, L - 1e-6, 1e-7, 1e-7, {L / 2});
        CHECK(ck == doctest::Approx(direct).epsilon(1e-4));
        CHECK(std::fabs(ck - direct) < 1e-4);
    };
    check(half_plane_spec(96), {0.3, 0.9}, {-0.4, 1.1});
    check(quarter_plane_spec(96), {0.8, 0.9}, {1.1, 0.6});
}

TEST_CASE("vertex-cone time limit with decreasing deviation") {
    std::vector<ConeKernelSpec> specs{half_plane_spec(), quarter_plane_spec()};
    for (const auto& ks : specs) {
        double alpha = ks.spectral.alpha;
        double norm = std::pow(2.0, alpha) * std::tgamma(1.0 + alpha);
        Vec pts[3][2] = {{{0.3, 0.8}, {0.5, 1.1}}, {{1.0, 1.2}, {0.7, 0.4}}, {{0.2, 1.9}, {1.4, 0.9}}};
        for (auto& pr : pts) {
            Vec x = pr[0], y = pr[1];
            double vv = minimal_harmonic_v(ks.spectral, x) * minimal_harmonic_v(ks.spectral, y);
            double prev = 1e300;
            for (double t : {1e2, 1e3, 1e4}) {
                double dev = std::fabs(std::pow(t, 1.0 + alpha) *
                                           cone_heat_kernel(ks, t, x, y).value * norm / vv -
                                       1.0);
                CHECK(dev < prev);
                prev = dev;
                if (t == 1e4) CHECK(dev <= 0.01);
            }
        }
    }
}

TEST_CASE("minimal harmonic function v") {
    auto hp = spectrum(Opening::arc(0, kPi), 4);
    CHECK(minimal_harmonic_v(hp, {0, 2}) == doctest::Approx(2 * std::sqrt(2 / kPi)).epsilon(1e-13));
    CHECK(minimal_harmonic_v(hp, {3, 0}) == 0.0); // boundary
    CHECK_THROWS_AS(minimal_harmonic_v(hp, {0, -1}), Error);
    auto qp = spectrum(Opening::arc(0, kPi / 2), 4);
    CHECK(minimal_harmonic_v(qp, {1, 1}) == doctest::Approx(2 * std::sqrt(4 / kPi)).epsilon(1e-13));
}

TEST_CASE("v satisfies the mean value property") {
    auto check = [](const SpectralData& spec, Vec c, double rad) {
        double center = minimal_harmonic_v(spec, c);
        double mean = 0.0;
        const int n = 512;
        for (int i = 0; i < n; ++i) {
            double a = 2 * kPi * i / n;
            mean += minimal_harmonic_v(spec, c + Vec{std::cos(a), std::sin(a)} * rad);
        }
        mean /= n;
        CHECK(mean == doctest::Approx(center).epsilon(1e-6));
    };
    check(spectrum(Opening::arc(0, kPi), 2), {0.2, 1.4}, 0.12);
    check(spectrum(Opening::arc(0, kPi / 2), 2), {1.1, 0.9}, 0.1);
    check(spectrum(Opening::arc(0.7, 0.7 + 2.6), 2), Vec{std::cos(2.0), std::sin(2.0)} * 1.5, 0.1);
}

TEST_CASE("truncated harmonic w: closed form checks") {
    auto hp = spectrum(Opening::arc(0, kPi), 4);
    // known closed form sqrt(2/pi) x2 (1 - |x|^{-2}) for the half-plane cone
    CHECK(truncated_harmonic_w(hp, 1.0, {0, 2}) ==
          doctest::Approx(std::sqrt(2 / kPi) * 1.5).epsilon(1e-13));
    CHECK(truncated_harmonic_w(hp, 1.0, {1.3, 1.1}) ==
          doctest::Approx(std::sqrt(2 / kPi) * 1.1 * (1.0 - 1.0 / (1.3 * 1.3 + 1.1 * 1.1)))
              .epsilon(1e-13));
    // vanishes on the base and the lateral boundary
    CHECK(truncated_harmonic_w(hp, 1.0, {0, 1}) == 0.0);
    CHECK(truncated_harmonic_w(hp, 1.0, {2, 0}) == 0.0);
    CHECK_THROWS_AS(truncated_harmonic_w(hp, 1.0, {0, 0.5}), Error);

    // w is harmonic: five-point Laplacian at interior points (finite-difference oracle)
    auto qp = spectrum(Opening::arc(0, kPi / 2), 4);
    for (Vec c : {Vec{1.2, 1.0}, Vec{2.1, 0.8}, Vec{0.9, 2.4}}) {
        const double h = 1e-3;
        auto w = [&](Vec p) { return truncated_harmonic_w(qp, 1.0, p); };
        double lap = (w({c.x + h, c.y}) + w({c.x - h, c.y}) + w({c.x, c.y + h}) +
                      w({c.x, c.y - h}) - 4.0 * w(c)) /
                     (h * h);
        CHECK(std::fabs(lap) < 1e-5 * std::max(1.0, w(c)));
    }

    // w/v -> 1 radially
    for (double r : {5.0, 20.0, 100.0}) {
        Vec p{0, r};
        double ratio = truncated_harmonic_w(hp, 1.0, p) / minimal_harmonic_v(hp, p);
        CHECK(ratio == doctest::Approx(1.0 - 1.0 / (r * r)).epsilon(1e-12));
    }
}

TEST_CASE("gamma_v closed-form values") {
    CHECK(gamma_v(spectrum(Opening::arc(0, kPi), 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gamma_v(spectrum(Opening::arc(0, kPi / 2), 1)) ==
          doctest::Approx(std::sqrt(4 / kPi) / 4).epsilon(1e-12));
    CHECK(gamma_v(spectrum(Opening::cap(kPi / 2), 1)) > 0.0);
    CHECK(gamma_v(spectrum(Opening::cap(0.9), 1)) > 0.0);
}

TEST_CASE("survival series against Gaussian oracles") {
    auto ks = half_plane_spec(900);
    auto s1 = cone_survival_series(ks, 1.0, {0, 1});
    CHECK(s1.value == doctest::Approx(oracles::half_line_survival(1.0, 1.0)).epsilon(1e-6));
    CHECK(std::fabs(s1.value - 0.6826894921) < 1e-6);

    // continuity at t -> 0
    auto s0 = cone_survival_series(ks, 1e-4, {0, 1});
    CHECK(s0.value >= 1.0 - 1e-8);

    // long-time asymptotic (also Theorem smits with gamma_V = 1)
    auto sl = cone_survival_series(ks, 1e4, {0, 1});
    double target = std::sqrt(2 / kPi) * 1.0 / 100.0;
    CHECK(sl.value == doctest::Approx(target).epsilon(0.01));

    // quarter plane: product of half-line survivals
    auto kq = quarter_plane_spec(128);
    auto sq = cone_survival_series(kq, 0.5, {0.8, 1.1});
    double oq = oracles::half_line_survival(0.8, 0.5) * oracles::half_line_survival(1.1, 0.5);
    CHECK(sq.value == doctest::Approx(oq).epsilon(1e-6));
}

TEST_CASE("yaglom limit density") {
    auto hp = spectrum(Opening::arc(0, kPi), 1);
    // half-plane at (0,1): equals the standard normal density at 1
    CHECK(yaglom_density_cone(hp, {0, 1}) ==
          doctest::Approx(std::exp(-0.5) / std::sqrt(2 * kPi)).epsilon(1e-12));
    CHECK(yaglom_density_cone(hp, {1, 0}) == 0.0);

    // normalization: radial x angular factorization integrates to one
    auto normalization = [](const SpectralData& spec) {
        double radial = integrate(
            [&](double r) {
                return std::pow(r, spec.kappa + spec.dim - 1.0) * std::exp(-0.5 * r * r);
            },
            0.0, 20.0, 1e-12);
        double norm = gamma_v(spec) *
                      std::exp(spec.alpha * std::log(2.0) + std::lgamma(1.0 + spec.alpha));
        return radial * spec.first_integral() / norm;
    };
    CHECK(normalization(hp) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(normalization(spectrum(Opening::arc(0, kPi / 2), 1)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(normalization(spectrum(Opening::cap(kPi / 2), 1)) == doctest::Approx(1.0).epsilon(1e-8));

    // independent 2D quadrature over the half-plane cone
    double full = integrate(
        [&](double ang) {
            return integrate(
                [&](double r) { return r * yaglom_density_cone(hp, {r * std::cos(ang), r * std::sin(ang)}); },
                1e-9, 12.0, 1e-10);
        },
        1e-9, kPi - 1e-9, 1e-8);
    CHECK(full == doctest::Approx(1.0).epsilon(1e-7));

    // radial CDF matches quadrature of the radial density
    auto qp = spectrum(Opening::arc(0, kPi / 2), 1);
    for (double rho : {0.5, 1.0, 2.0}) {
        double direct = integrate(
                            [&](double r) {
                                return std::pow(r, qp.kappa + 1.0) * std::exp(-0.5 * r * r);
                            },
                            0.0, rho, 1e-12) /
                        integrate(
                            [&](double r) {
                                return std::pow(r, qp.kappa + 1.0) * std::exp(-0.5 * r * r);
                            },
                            0.0, 30.0, 1e-12);
        CHECK(yaglom_radial_cdf(qp, rho) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("kernel truncation reports the required series length") {
    ConeKernelSpec tiny(spectrum(Opening::arc(0, kPi), 4), {0, 0, 0}, 4, 1e-14);
    try {
        cone_heat_kernel(tiny, 0.01, {0, 1}, {0.1, 1}); // z = ~100 needs many terms
        FAIL("expected a truncation error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("terms") != std::string::npos);
    }
}
