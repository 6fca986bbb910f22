#include <doctest.h>

#include <cmath>

#include "heatlab/geometry.hpp"
#include "heatlab/rng.hpp"

using namespace heatlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

MulticoneDomain canonical() {
    MulticoneDomain d;
    d.dim = 2;
    d.core.push_back({{0, 0, 0}, 1.0});
    d.branches.emplace_back(Vec{0, 0, 0}, Opening::arc(-kPi / 4, kPi / 4), 1.0);
    return d;
}
} // namespace

TEST_CASE("validate accepts the canonical domain") {
    CHECK(validate(canonical()).empty());
}

TEST_CASE("validate flags overlapping same-vertex branches") {
    auto d = canonical();
    d.branches.emplace_back(Vec{0, 0, 0}, Opening::arc(0.0, kPi / 2), 1.0);
    auto v = validate(d);
    REQUIRE(!v.empty());
    bool found = false;
    for (const auto& s : v) found = found || s.find("intersect") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validate flags a nonpositive truncation radius") {
    auto d = canonical();
    d.branches[0].radius = 0.0;
    auto v = validate(d);
    REQUIRE(!v.empty());
    CHECK(v[0].find("truncation radius must be positive") != std::string::npos);
}

TEST_CASE("validate flags a base detached from the core") {
    auto d = canonical();
    d.branches[0].radius = 2.0; // base no longer on the unit circle
    auto v = validate(d);
    REQUIRE(!v.empty());
    CHECK(v[0].find("base") != std::string::npos);
}

TEST_CASE("classify examples") {
    auto d = canonical();
    CHECK(classify(d, {2, 0}).tag == LocationTag::Branch);
    CHECK(classify(d, {2, 0}).branch == 0);
    CHECK(classify(d, {0.5, 0}).tag == LocationTag::Core);
    CHECK(classify(d, {0, 3}).tag == LocationTag::Outside);
}

TEST_CASE("distance_to_boundary examples") {
    auto d = canonical();
    // min(2 sin(pi/4), 2 - 1) = 1
    CHECK(distance_to_boundary(d, {2, 0}) == doctest::Approx(1.0).epsilon(1e-12));

    // half-plane-like branch: distance equals the height above the rays
    MulticoneDomain hp;
    hp.dim = 2;
    hp.core.push_back({{0, 0, 0}, 1e-9});
    hp.branches.emplace_back(Vec{0, 0, 0}, Opening::arc(0, kPi), 1e-9);
    CHECK(distance_to_boundary(hp, {0.5, 0.25}) == doctest::Approx(0.25).epsilon(1e-8));

    // boundary point reports zero
    Vec edge{2 * std::cos(kPi / 4), -2 * std::sin(kPi / 4)};
    CHECK(distance_to_boundary(d, edge) == doctest::Approx(0.0));

    CHECK_THROWS_AS(distance_to_boundary(d, {0, 3}), Error);
}

TEST_CASE("distance lower bounds never exceed sampled boundary distance") {
    auto check_domain = [](const MulticoneDomain& d, Rng& rng, double span) {
        // dense boundary sample: lateral sheets and core circles
        std::vector<Vec> boundary;
        for (const auto& br : d.branches) {
            for (int i = 0; i < 400; ++i) {
                double s = br.radius + span * i / 400.0;
                boundary.push_back(br.vertex + br.edge_a * s);
                boundary.push_back(br.vertex + br.edge_b * s);
            }
        }
        for (const auto& ball : d.core)
            for (int i = 0; i < 1200; ++i) {
                double a = 2 * kPi * i / 1200.0;
                Vec p = ball.center + Vec{std::cos(a), std::sin(a)} * ball.radius;
                bool in_branch = false;
                for (const auto& br : d.branches) in_branch = in_branch || br.contains(p * 1.0001);
                if (!in_branch) boundary.push_back(p);
            }
        for (int i = 0; i < 300; ++i) {
            Vec x{(rng.u01() - 0.5) * span, (rng.u01() - 0.5) * span};
            auto loc = classify(d, x);
            if (loc.tag == LocationTag::Outside) continue;
            double truth = 1e300;
            for (const auto& b : boundary) truth = std::min(truth, (x - b).norm());
            CHECK(loc.boundary_distance <= truth + 1e-9);
            CHECK(distance_to_boundary(d, x) <= truth + 1e-9);
        }
    };
    Rng rng(5, 0);
    auto d1 = canonical();
    check_domain(d1, rng, 8.0);
    MulticoneDomain d2;
    d2.dim = 2;
    d2.core.push_back({{0, 0, 0}, 1.0});
    d2.branches.emplace_back(Vec{0, 0, 0}, Opening::arc(0.3, 2.9), 1.0);
    d2.branches.emplace_back(Vec{0, 0, 0}, Opening::arc(3.4, 4.1), 1.0);
    check_domain(d2, rng, 8.0);
}

TEST_CASE("classification is stable under small perturbations") {
    auto d = canonical();
    Rng rng(17, 1);
    int tested = 0;
    for (int i = 0; i < 2000 && tested < 200; ++i) {
        Vec x{(rng.u01() - 0.5) * 6.0, (rng.u01() - 0.5) * 6.0};
        auto loc = classify(d, x);
        if (loc.tag == LocationTag::Outside || loc.boundary_distance < 0.05) continue;
        ++tested;
        double eps = 0.9 * loc.boundary_distance;
        for (int k = 0; k < 10; ++k) {
            double a = 2 * kPi * rng.u01();
            Vec y = x + Vec{std::cos(a), std::sin(a)} * (eps * rng.u01());
            auto loc2 = classify(d, y);
            CHECK(loc2.tag == loc.tag);
        }
    }
    CHECK(tested > 50);
}

TEST_CASE("3D cap cone membership and distance") {
    TruncatedCone cone({0, 0, 0}, Opening::cap(kPi / 4), 1.0);
    CHECK(cone.contains({0, 0, 2}));
    CHECK(!cone.contains({0, 0, 0.5}));
    CHECK(!cone.contains({2, 0, 0.1}));
    // on the axis at height h: lateral distance = h sin(colat)
    CHECK(cone.lateral_distance({0, 0, 3}) == doctest::Approx(3 * std::sin(kPi / 4)).epsilon(1e-12));
    CHECK(cone.boundary_distance({0, 0, 3}) == doctest::Approx(2.0).epsilon(1e-12));

    MulticoneDomain d3;
    d3.dim = 3;
    d3.core.push_back({{0, 0, 0}, 1.0});
    d3.branches.push_back(cone);
    CHECK(validate(d3).empty());
    CHECK(classify(d3, {0, 0, 2}).tag == LocationTag::Branch);
    CHECK(classify(d3, {0.2, 0, 0}).tag == LocationTag::Core);
    CHECK(classify(d3, {0, 0, -2}).tag == LocationTag::Outside);
}

TEST_CASE("opening parameter validation") {
    CHECK_THROWS_AS(Opening::arc(1.0, 1.0), Error);
    CHECK_THROWS_AS(Opening::arc(0.0, 7.0), Error);
    CHECK_THROWS_AS(Opening::cap(0.0), Error);
    CHECK_THROWS_AS(Opening::cap(1.0, Vec{1, 1, 0}), Error); // axis not unit
}
