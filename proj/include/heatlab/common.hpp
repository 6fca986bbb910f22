#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace heatlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point/vector in R^n with n = 2 or 3. The z component is kept at zero
// for planar domains; the active dimension travels with the domain objects.
struct Vec {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec() = default;
    Vec(double x_, double y_, double z_ = 0.0) : x(x_), y(y_), z(z_) {}

    Vec operator+(const Vec& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec operator-(const Vec& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec& operator+=(const Vec& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

// 64-bit FNV-1a, used for config/provenance hashes.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

constexpr const char* kVersion = "0.1.0";

} // namespace heatlab
