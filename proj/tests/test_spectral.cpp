#include <doctest.h>

#include <cmath>

#include "heatlab/quadrature.hpp"
#include "heatlab/spectral.hpp"

using namespace heatlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("half-plane arc closed forms") {
    auto s = spectrum(Opening::arc(0, kPi), 3);
    CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.eigenvalues[1] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(s.characters[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.kappa == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.beta == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(s.eigenfunction(1, kPi / 2) == doctest::Approx(0.7978845608).epsilon(1e-9));
    CHECK(s.eigenfunction(1, 0.0) == 0.0);
    CHECK(s.first_integral() == doctest::Approx(2 * std::sqrt(2 / kPi)).epsilon(1e-14));
}

TEST_CASE("quarter-plane arc eigenvalues") {
    auto s = spectrum(Opening::arc(0, kPi / 2), 2);
    CHECK(s.eigenvalues[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(s.eigenvalues[1] == doctest::Approx(16.0).epsilon(1e-15));
    CHECK(s.characters[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.characters[1] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(s.kappa == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("hemisphere cap: zonal Dirichlet ground state") {
    auto s = spectrum(Opening::cap(kPi / 2), 2);
    CHECK(s.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(s.characters[0] == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(s.kappa == doctest::Approx(1.0).epsilon(1e-10));
    // m^1 = sqrt(3/(2 pi)) cos(theta)
    CHECK(s.eigenfunction(1, 0.0) == doctest::Approx(std::sqrt(3 / (2 * kPi))).epsilon(1e-7));
    CHECK(s.eigenfunction(1, kPi / 4) ==
          doctest::Approx(std::sqrt(3 / (2 * kPi)) * std::cos(kPi / 4)).epsilon(1e-7));
    // next zonal mode is the degree-3 harmonic, lambda = 12
    CHECK(s.eigenvalues[1] == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(s.first_integral() == doctest::Approx(std::sqrt(1.5 * kPi)).epsilon(1e-9));
}

TEST_CASE("orthonormality by quadrature") {
    // 2D arc: sigma is arc length
    auto s2 = spectrum(Opening::arc(0.4, 0.4 + 1.7), 4);
    for (int i = 1; i <= 4; ++i)
        for (int j = i; j <= 4; ++j) {
            double v = integrate([&](double u) { return s2.eigenfunction(i, u) * s2.eigenfunction(j, u); },
                                 0.0, 1.7, 1e-12);
            CHECK(v == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
        }
    // 3D cap: sigma is spherical surface measure
    auto s3 = spectrum(Opening::cap(2.0), 4);
    for (int i = 1; i <= 4; ++i)
        for (int j = i; j <= 4; ++j) {
            double v = 2 * kPi *
                       integrate(
                           [&](double u) {
                               return s3.eigenfunction(i, u) * s3.eigenfunction(j, u) * std::sin(u);
                           },
                           0.0, 2.0, 1e-12);
            if (i == j) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
            else CHECK(std::fabs(v) < 1e-8);
        }
}

TEST_CASE("eigenfunctions vanish on the opening boundary") {
    auto s2 = spectrum(Opening::arc(0, 2.2), 3);
    for (int i = 1; i <= 3; ++i) {
        CHECK(s2.eigenfunction(i, 0.0) == 0.0);
        CHECK(std::fabs(s2.eigenfunction(i, 2.2)) < 1e-12);
    }
    auto s3 = spectrum(Opening::cap(1.1), 3);
    for (int i = 1; i <= 3; ++i) CHECK(std::fabs(s3.eigenfunction(i, 1.1)) < 1e-7);
}

TEST_CASE("first eigenfunction positive inside") {
    auto s3 = spectrum(Opening::cap(2.4), 2);
    for (double u = 0.05; u < 2.39; u += 0.05) CHECK(s3.eigenfunction(1, u) > 0.0);
}

TEST_CASE("enlarging an arc strictly decreases the ground eigenvalue") {
    double prev = 1e300;
    for (double L : {kPi / 2, kPi, 1.5 * kPi}) {
        auto s = spectrum(Opening::arc(0, L), 1);
        CHECK(s.eigenvalues[0] < prev);
        prev = s.eigenvalues[0];
    }
    // same on caps
    double prev3 = 1e300;
    for (double c : {0.8, 1.4, 2.3}) {
        auto s = spectrum(Opening::cap(c), 1);
        CHECK(s.eigenvalues[0] < prev3);
        prev3 = s.eigenvalues[0];
    }
}

TEST_CASE("characters strictly increase with the eigenvalue index") {
    auto s = spectrum(Opening::cap(1.9), 5);
    for (int i = 1; i < 5; ++i) CHECK(s.characters[i] > s.characters[i - 1]);
    for (int i = 0; i < 5; ++i)
        CHECK(s.characters[i] ==
              doctest::Approx(std::sqrt(s.eigenvalues[i] + 0.25)).epsilon(1e-15));
}

TEST_CASE("angular CDF of the ground mode") {
    auto s2 = spectrum(Opening::arc(0, kPi), 1);
    CHECK(s2.first_angular_cdf(0.0) == 0.0);
    CHECK(s2.first_angular_cdf(kPi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s2.first_angular_cdf(kPi / 2) == doctest::Approx(0.5).epsilon(1e-14));
    auto s3 = spectrum(Opening::cap(kPi / 2), 1);
    // density prop to cos(u) sin(u): CDF(u) = sin^2(u)
    CHECK(s3.first_angular_cdf(kPi / 4) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(s3.first_angular_cdf(kPi / 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum error contracts") {
    CHECK_THROWS_AS(spectrum(Opening::arc(0, kPi), 0), Error);
    CHECK_THROWS_AS(spectrum(Opening::arc(0, kPi), 10001), Error);
    CHECK_THROWS_AS(spectrum(Opening::cap(0.01), 500), Error); // cannot bracket in nu <= 200
    auto s = spectrum(Opening::arc(0, kPi), 2);
    CHECK_THROWS_AS(s.eigenfunction(3, 1.0), Error);
    CHECK_THROWS_AS(s.eigenfunction(1, 4.0), Error);
}
