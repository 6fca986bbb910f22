#include <doctest.h>

#include <cmath>

#include "heatlab/common.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/special.hpp"

using namespace heatlab;

TEST_CASE("incomplete gamma against closed forms") {
    for (double x : {0.01, 0.3, 1.0, 2.5, 9.0}) {
        CHECK(gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-13));
        CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
        CHECK(gamma_p(2.0, x) == doctest::Approx(1.0 - std::exp(-x) * (1.0 + x)).epsilon(1e-13));
    }
    CHECK(gamma_p(3.0, 0.0) == 0.0);
    CHECK_THROWS_AS(gamma_p(-1.0, 1.0), Error);
}

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-12));
}

TEST_CASE("gauss-legendre integrates high-degree polynomials") {
    const auto& rule = gauss_legendre(16);
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], 30);
    CHECK(acc == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // narrow Gaussian bump, split hint at the peak
    auto bump = [](double x) { return std::exp(-(x - 3.0) * (x - 3.0) * 1e4); };
    double v = integrate(bump, 0.0, 100.0, 1e-12, 1e-12, {3.0});
    CHECK(v == doctest::Approx(std::sqrt(3.14159265358979323846) / 100.0).epsilon(1e-10));
}

TEST_CASE("ks critical value at the 1% level") {
    CHECK(ks_critical(0.01, 10000) == doctest::Approx(1.6276 / 100.0).epsilon(1e-3));
}

TEST_CASE("slope fit recovers a line") {
    std::vector<double> x{1, 2, 3, 4}, y{0.5, 1.5, 2.5, 3.5};
    CHECK(fit_slope(x, y) == doctest::Approx(1.0).epsilon(1e-14));
}
