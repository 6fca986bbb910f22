#pragma once

#include <string>
#include <vector>

#include "heatlab/common.hpp"

namespace heatlab {

// Cross-section of a cone on the unit sphere: a planar arc (n = 2) or a
// zonal polar cap (n = 3).
struct Opening {
    enum class Kind { Arc, Cap };

    Kind kind = Kind::Arc;
    int dim = 2;
    double theta_a = 0.0, theta_b = 0.0; // arc endpoints, theta_a < theta_b
    Vec axis{0, 0, 1};                   // cap axis (unit)
    double colat = 0.0;                  // cap colatitude in (0, pi)

    static Opening arc(double a, double b);
    static Opening cap(double colatitude, const Vec& axis = {0, 0, 1});

    // arc length L, or cap colatitude
    double width() const { return kind == Kind::Arc ? theta_b - theta_a : colat; }
    // sigma(D): L for an arc, 2*pi*(1-cos(colat)) for a cap
    double surface_measure() const;
    // intrinsic angular coordinate of a direction: arc offset from theta_a
    // in [0, 2*pi), or colatitude from the axis
    double coordinate(const Vec& direction) const;
    bool contains_coordinate(double u) const { return u > 0.0 && u < width(); }
    void check() const; // throws Error on malformed parameters
};

// C(a, D, R): points a + r*theta with r > R, theta in the opening.
struct TruncatedCone {
    Vec vertex;
    Opening opening;
    double radius = 1.0;

    TruncatedCone() = default;
    TruncatedCone(const Vec& vertex_, const Opening& opening_, double radius_);

    bool contains(const Vec& x) const;
    // exact distance to the lateral sheet {vertex + s*edge : s >= R}
    double lateral_distance(const Vec& x) const;
    // distance to the cone's own boundary (lateral sheet + base sphere);
    // exact away from the base corner, a lower bound everywhere
    double boundary_distance(const Vec& x) const;

    // cached query data, set by the constructor
    Vec edge_a, edge_b;   // 2D edge directions
    bool wide = false;    // arc width > pi
    double cos_colat = 0.0, sin_colat = 0.0;
};

struct Ball {
    Vec center;
    double radius = 1.0;
};

struct MulticoneDomain {
    int dim = 2;
    std::vector<Ball> core;
    std::vector<TruncatedCone> branches;
    double tol = 1e-9;
};

enum class LocationTag { Core, Branch, Outside };

struct PointLocation {
    LocationTag tag = LocationTag::Outside;
    int branch = -1;
    // lower bound on the distance to the domain boundary; never overestimates
    double boundary_distance = 0.0;
};

// Every violated invariant, human readable; empty list means valid.
std::vector<std::string> validate(const MulticoneDomain& domain);

PointLocation classify(const MulticoneDomain& domain, const Vec& x);

// Conservative in-branch distance min(lateral, r - R_j); throws if x is
// outside the domain.
double distance_to_boundary(const MulticoneDomain& domain, const Vec& x);

// Lower bound on dist(x, boundary) built from the exposed boundary pieces
// (lateral sheets plus core spheres minus base caps). Sharper than
// distance_to_boundary near a base; this is what the walk uses.
double exposed_boundary_distance(const MulticoneDomain& domain, const Vec& x);

std::uint64_t domain_hash(const MulticoneDomain& domain);

} // namespace heatlab
