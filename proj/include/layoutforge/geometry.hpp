#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace layoutforge {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

using Polygon = std::vector<Vec2>;
using Quad = std::array<Vec2, 4>;

struct Aabb2 {
    Vec2 lo;
    Vec2 hi;
};

/// Signed area; positive for counterclockwise vertex order.
double signed_area(std::span<const Vec2> poly);

/// True when the polygon has at least three vertices, is strictly convex
/// (collinear vertices tolerated) and winds counterclockwise.
bool is_convex_ccw(std::span<const Vec2> poly);

Aabb2 bounding_box(std::span<const Vec2> poly);

/// Inside-or-on-boundary test for a counterclockwise convex polygon.
bool contains_point(std::span<const Vec2> convex_ccw, Vec2 p, double eps = 1e-12);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Distance from p to the polygon region (0 inside or on the boundary).
double point_polygon_distance(std::span<const Vec2> convex_ccw, Vec2 p);

bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);
double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

/// Sutherland-Hodgman clip of `subject` against the convex CCW `clip` polygon.
Polygon clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

double intersection_area(std::span<const Vec2> a, std::span<const Vec2> b);

/// Minimum distance between two convex counterclockwise polygons; 0 when
/// they touch or overlap.
double polygon_distance(std::span<const Vec2> a, std::span<const Vec2> b);

/// Largest distance between any two vertices.
double diameter(std::span<const Vec2> poly);

Vec2 centroid(std::span<const Vec2> poly);

}  // namespace layoutforge
