#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <tuple>

namespace ddq {

// Axial hex coordinates. Text/offset layout is even-r: col = q + (r + (r&1))/2.
struct Coord {
    int q = 0;
    int r = 0;

    friend bool operator==(const Coord&, const Coord&) = default;
    // Canonical order used for every deterministic tie-break: row first.
    friend bool operator<(const Coord& a, const Coord& b) {
        return std::tie(a.r, a.q) < std::tie(b.r, b.q);
    }
};

// Fixed neighbor enumeration: E, NE, NW, W, SW, SE.
inline constexpr std::array<Coord, 6> kHexDirs = {{
    {1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1},
}};

inline Coord operator+(Coord a, Coord b) { return {a.q + b.q, a.r + b.r}; }
inline Coord operator-(Coord a, Coord b) { return {a.q - b.q, a.r - b.r}; }

inline int hex_dist(Coord a, Coord b) {
    const int dq = a.q - b.q;
    const int dr = a.r - b.r;
    return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

// Cell centers in units of the lattice spacing.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 v) { return dot(v, v); }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }

inline Vec2 to_cart(Coord c) {
    return {c.q + 0.5 * c.r, 0.8660254037844386 * c.r};
}

inline Coord axial_from_offset(int col, int row) {
    return {col - (row + (row & 1)) / 2, row};
}

inline int offset_col(Coord c) { return c.q + (c.r + (c.r & 1)) / 2; }

struct CoordHash {
    std::size_t operator()(const Coord& c) const {
        return std::hash<std::int64_t>()(
            (static_cast<std::int64_t>(c.q) << 32) ^ static_cast<std::uint32_t>(c.r));
    }
};

// Squared distance from point p to segment [a, b].
inline double point_segment_dist2(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    if (len2 <= 0.0) return norm2(p - a);
    double t = dot(p - a, ab) / len2;
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    return norm2(p - (a + t * ab));
}

}  // namespace ddq
