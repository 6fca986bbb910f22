#include "heatlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heatlab/rng.hpp"

namespace heatlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double cross2(const Vec& a, const Vec& b) { return a.x * b.y - a.y * b.x; }

// distance from p to the ray {s*e : s >= R}, e a unit vector
double ray_distance(double px, double py, double ex, double ey, double R) {
    double t = px * ex + py * ey;
    if (t >= R) return std::fabs(px * ey - py * ex);
    double dx = px - R * ex, dy = py - R * ey;
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace

Opening Opening::arc(double a, double b) {
    Opening o;
    o.kind = Kind::Arc;
    o.dim = 2;
    o.theta_a = a;
    o.theta_b = b;
    o.check();
    return o;
}

Opening Opening::cap(double colatitude, const Vec& axis) {
    Opening o;
    o.kind = Kind::Cap;
    o.dim = 3;
    o.colat = colatitude;
    o.axis = axis;
    o.check();
    return o;
}

void Opening::check() const {
    if (kind == Kind::Arc) {
        if (dim != 2) throw Error("opening: arc requires dimension 2");
        double L = theta_b - theta_a;
        if (!(L > 0.0 && L < kTwoPi))
            throw Error("opening: arc length must lie in (0, 2*pi)");
    } else {
        if (dim != 3) throw Error("opening: cap requires dimension 3");
        if (!(colat > 0.0 && colat < kPi))
            throw Error("opening: cap colatitude must lie in (0, pi)");
        if (std::fabs(axis.norm() - 1.0) > 1e-12)
            throw Error("opening: cap axis must be a unit vector");
    }
}

double Opening::surface_measure() const {
    return kind == Kind::Arc ? theta_b - theta_a : kTwoPi * (1.0 - std::cos(colat));
}

double Opening::coordinate(const Vec& direction) const {
    if (kind == Kind::Arc) {
        double a = std::atan2(direction.y, direction.x);
        double u = a - theta_a;
        u -= kTwoPi * std::floor(u / kTwoPi);
        return u;
    }
    double c = std::clamp(direction.dot(axis), -1.0, 1.0);
    return std::acos(c);
}

// construction is lenient about the radius so validate() can report it
TruncatedCone::TruncatedCone(const Vec& vertex_, const Opening& opening_, double radius_)
    : vertex(vertex_), opening(opening_), radius(radius_) {
    opening.check();
    if (opening.kind == Opening::Kind::Arc) {
        edge_a = {std::cos(opening.theta_a), std::sin(opening.theta_a)};
        edge_b = {std::cos(opening.theta_b), std::sin(opening.theta_b)};
        wide = opening.width() > kPi;
    } else {
        cos_colat = std::cos(opening.colat);
        sin_colat = std::sin(opening.colat);
    }
}

bool TruncatedCone::contains(const Vec& x) const {
    Vec p = x - vertex;
    if (opening.kind == Opening::Kind::Arc) {
        if (p.x * p.x + p.y * p.y <= radius * radius) return false;
        if (!wide) return cross2(edge_a, p) > 0.0 && cross2(p, edge_b) > 0.0;
        // complement arc (from theta_b to theta_a) is narrower than pi
        return !(cross2(edge_b, p) >= 0.0 && cross2(p, edge_a) >= 0.0);
    }
    double r2 = p.norm2();
    if (r2 <= radius * radius) return false;
    return p.dot(opening.axis) > cos_colat * std::sqrt(r2);
}

double TruncatedCone::lateral_distance(const Vec& x) const {
    Vec p = x - vertex;
    if (opening.kind == Opening::Kind::Arc) {
        double da = ray_distance(p.x, p.y, edge_a.x, edge_a.y, radius);
        double db = ray_distance(p.x, p.y, edge_b.x, edge_b.y, radius);
        return std::min(da, db);
    }
    // meridian plane: point (axial-perp, along-axis), sheet = revolved ray
    double q = p.dot(opening.axis);
    double rho2 = std::max(p.norm2() - q * q, 0.0);
    return ray_distance(std::sqrt(rho2), q, sin_colat, cos_colat, radius);
}

double TruncatedCone::boundary_distance(const Vec& x) const {
    double r = (x - vertex).norm();
    return std::min(lateral_distance(x), std::fabs(r - radius));
}

namespace {

// distance from x to the exposed part of a core sphere (sphere minus the
// base caps of branches anchored on it); lower bound, never overestimates
double exposed_sphere_distance(const Ball& ball, const std::vector<const TruncatedCone*>& caps,
                               const Vec& x) {
    Vec w = x - ball.center;
    double s = w.norm();
    const TruncatedCone* covering = nullptr;
    if (s > 0.0) {
        for (const auto* cone : caps) {
            Vec dir = w * (1.0 / s);
            double u = cone->opening.coordinate(dir);
            if (cone->opening.contains_coordinate(u)) {
                covering = cone;
                break;
            }
        }
    }
    if (!covering) return std::fabs(s - ball.radius);
    // radial projection falls in a base cap: nearest exposed point is on a rim
    double best = std::numeric_limits<double>::infinity();
    for (const auto* cone : caps) {
        const Opening& op = cone->opening;
        if (op.kind == Opening::Kind::Arc) {
            for (const Vec& e : {cone->edge_a, cone->edge_b}) {
                Vec rim = ball.center + e * ball.radius;
                best = std::min(best, (x - rim).norm());
            }
        } else {
            double q = w.dot(op.axis);
            double rho = std::sqrt(std::max(w.norm2() - q * q, 0.0));
            double dr = rho - ball.radius * cone->sin_colat;
            double dq = q - ball.radius * cone->cos_colat;
            best = std::min(best, std::sqrt(dr * dr + dq * dq));
        }
    }
    return best;
}

std::vector<std::vector<const TruncatedCone*>> base_caps_per_ball(const MulticoneDomain& d) {
    std::vector<std::vector<const TruncatedCone*>> caps(d.core.size());
    for (std::size_t b = 0; b < d.core.size(); ++b)
        for (const auto& cone : d.branches)
            if ((cone.vertex - d.core[b].center).norm() <= d.tol &&
                std::fabs(cone.radius - d.core[b].radius) <= d.tol)
                caps[b].push_back(&cone);
    return caps;
}

bool in_core(const MulticoneDomain& d, const Vec& x) {
    for (const auto& b : d.core)
        if ((x - b.center).norm() < b.radius) return true;
    return false;
}

} // namespace

double exposed_boundary_distance(const MulticoneDomain& d, const Vec& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cone : d.branches)
        best = std::min(best, cone.lateral_distance(x));
    auto caps = base_caps_per_ball(d);
    for (std::size_t b = 0; b < d.core.size(); ++b)
        best = std::min(best, exposed_sphere_distance(d.core[b], caps[b], x));
    return best;
}

PointLocation classify(const MulticoneDomain& d, const Vec& x) {
    PointLocation loc;
    loc.boundary_distance = exposed_boundary_distance(d, x);
    for (std::size_t j = 0; j < d.branches.size(); ++j)
        if (d.branches[j].contains(x)) {
            loc.tag = LocationTag::Branch;
            loc.branch = static_cast<int>(j);
            return loc;
        }
    if (in_core(d, x)) {
        loc.tag = LocationTag::Core;
        return loc;
    }
    loc.tag = LocationTag::Outside;
    return loc;
}

double distance_to_boundary(const MulticoneDomain& d, const Vec& x) {
    double best = std::numeric_limits<double>::infinity();
    bool inside = in_core(d, x);
    for (const auto& cone : d.branches) {
        best = std::min(best, cone.lateral_distance(x));
        if (cone.contains(x)) {
            inside = true;
            best = std::min(best, (x - cone.vertex).norm() - cone.radius);
        }
    }
    for (const auto& ball : d.core)
        best = std::min(best, std::fabs((x - ball.center).norm() - ball.radius));
    // points on the boundary itself report distance zero
    if (!inside && best > d.tol) throw Error("distance_to_boundary: point outside the domain");
    return best;
}

namespace {

// circular-interval overlap for same-vertex arcs
bool arcs_overlap(const Opening& a, const Opening& b) {
    double a0 = a.theta_a, a1 = a.theta_b;
    double b0 = b.theta_a, b1 = b.theta_b;
    for (int k = -1; k <= 1; ++k) {
        double lo = std::max(a0, b0 + k * kTwoPi);
        double hi = std::min(a1, b1 + k * kTwoPi);
        if (hi - lo > 1e-12) return true;
    }
    return false;
}

Vec sample_direction(const Opening& op, Rng& rng) {
    if (op.kind == Opening::Kind::Arc) {
        double t = op.theta_a + rng.u01() * op.width();
        return {std::cos(t), std::sin(t)};
    }
    // uniform on the cap: cos(theta) uniform on [cos(colat), 1)
    double c = 1.0 - rng.u01() * (1.0 - std::cos(op.colat));
    double s = std::sqrt(std::max(1.0 - c * c, 0.0));
    double phi = kTwoPi * rng.u01();
    Vec n = op.axis;
    // orthonormal frame around the axis
    Vec h = std::fabs(n.x) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
    Vec u{n.y * h.z - n.z * h.y, n.z * h.x - n.x * h.z, n.x * h.y - n.y * h.x};
    u = u * (1.0 / u.norm());
    Vec v{n.y * u.z - n.z * u.y, n.z * u.x - n.x * u.z, n.x * u.y - n.y * u.x};
    return n * c + (u * std::cos(phi) + v * std::sin(phi)) * s;
}

} // namespace

std::vector<std::string> validate(const MulticoneDomain& d) {
    std::vector<std::string> bad;
    auto add = [&](const std::string& s) { bad.push_back(s); };

    if (d.dim != 2 && d.dim != 3) add("dimension must be 2 or 3");
    if (d.core.empty()) add("core must contain at least one ball");
    for (std::size_t b = 0; b < d.core.size(); ++b)
        if (!(d.core[b].radius > 0.0))
            add("core ball " + std::to_string(b) + ": radius must be positive");

    for (std::size_t j = 0; j < d.branches.size(); ++j) {
        const auto& cone = d.branches[j];
        std::string tag = "branch " + std::to_string(j) + ": ";
        if (!(cone.radius > 0.0)) add(tag + "truncation radius must be positive");
        try {
            cone.opening.check();
        } catch (const Error& e) {
            add(tag + e.what());
        }
        if (cone.opening.dim != d.dim) add(tag + "opening dimension mismatch");
    }
    if (!bad.empty()) return bad;

    // base points must sit on the closure of the core
    for (std::size_t j = 0; j < d.branches.size(); ++j) {
        const auto& cone = d.branches[j];
        Rng rng(7, j);
        double worst = 0.0;
        for (int k = 0; k < 64; ++k) {
            Vec p = cone.vertex + sample_direction(cone.opening, rng) * cone.radius;
            double dist = std::numeric_limits<double>::infinity();
            for (const auto& ball : d.core)
                dist = std::min(dist, (p - ball.center).norm() - ball.radius);
            worst = std::max(worst, std::max(dist, 0.0));
        }
        if (worst > d.tol)
            bad.push_back("branch " + std::to_string(j) +
                          ": base does not lie on the core boundary (gap " +
                          std::to_string(worst) + ")");
    }

    // pairwise branch disjointness
    const int n_samples = 100000;
    for (std::size_t i = 0; i < d.branches.size(); ++i) {
        for (std::size_t j = i + 1; j < d.branches.size(); ++j) {
            const auto& a = d.branches[i];
            const auto& b = d.branches[j];
            bool hit = false;
            if ((a.vertex - b.vertex).norm() <= d.tol) {
                if (a.opening.kind == Opening::Kind::Arc)
                    hit = arcs_overlap(a.opening, b.opening);
                else {
                    double ang = std::acos(std::clamp(a.opening.axis.dot(b.opening.axis), -1.0, 1.0));
                    hit = ang < a.opening.colat + b.opening.colat - 1e-12;
                }
            } else {
                Rng rng(11, i * 1000 + j);
                double span = a.radius + b.radius + (a.vertex - b.vertex).norm() + 2.0;
                for (int k = 0; k < n_samples && !hit; ++k) {
                    Vec p = a.vertex + sample_direction(a.opening, rng) *
                                           (a.radius + rng.u01() * span);
                    hit = b.contains(p);
                }
            }
            if (hit)
                bad.push_back("branches " + std::to_string(i) + " and " + std::to_string(j) +
                              " intersect");
        }
    }

    // branch interiors must avoid the core
    for (std::size_t j = 0; j < d.branches.size(); ++j) {
        const auto& cone = d.branches[j];
        Rng rng(13, j);
        bool hit = false;
        for (int k = 0; k < n_samples && !hit; ++k) {
            Vec p = cone.vertex +
                    sample_direction(cone.opening, rng) * (cone.radius * (1.0 + 2.0 * rng.u01()) + 1e-12);
            hit = in_core(d, p);
        }
        if (hit) bad.push_back("branch " + std::to_string(j) + " intersects the core");
    }

    return bad;
}

std::uint64_t domain_hash(const MulticoneDomain& d) {
    std::ostringstream os;
    os.precision(17);
    os << d.dim << '|';
    for (const auto& b : d.core) os << b.center.x << ',' << b.center.y << ',' << b.center.z << ',' << b.radius << ';';
    os << '|';
    for (const auto& c : d.branches) {
        os << c.vertex.x << ',' << c.vertex.y << ',' << c.vertex.z << ',' << c.radius << ',';
        if (c.opening.kind == Opening::Kind::Arc)
            os << "arc," << c.opening.theta_a << ',' << c.opening.theta_b << ';';
        else
            os << "cap," << c.opening.colat << ',' << c.opening.axis.x << ',' << c.opening.axis.y
               << ',' << c.opening.axis.z << ';';
    }
    return fnv1a(os.str());
}

} // namespace heatlab
