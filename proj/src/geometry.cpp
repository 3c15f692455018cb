#include "layoutforge/geometry.hpp"

#include <algorithm>
#include <limits>

namespace layoutforge {

double signed_area(std::span<const Vec2> poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        twice += cross(poly[i], poly[(i + 1) % n]);
    }
    return 0.5 * twice;
}

bool is_convex_ccw(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) {
        return false;
    }
    if (signed_area(poly) <= 0.0) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % n];
        const Vec2 c = poly[(i + 2) % n];
        if (cross(b - a, c - b) < -1e-12) {
            return false;
        }
    }
    return true;
}

Aabb2 bounding_box(std::span<const Vec2> poly) {
    Aabb2 box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
              {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const Vec2& p : poly) {
        box.lo.x = std::min(box.lo.x, p.x);
        box.lo.y = std::min(box.lo.y, p.y);
        box.hi.x = std::max(box.hi.x, p.x);
        box.hi.y = std::max(box.hi.y, p.y);
    }
    return box;
}

bool contains_point(std::span<const Vec2> convex_ccw, Vec2 p, double eps) {
    const std::size_t n = convex_ccw.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = convex_ccw[i];
        const Vec2 b = convex_ccw[(i + 1) % n];
        const Vec2 edge = b - a;
        const double len = norm(edge);
        if (len == 0.0) {
            continue;
        }
        // signed distance of p to the edge line, positive on the inner side
        if (cross(edge, p - a) / len < -eps) {
            return false;
        }
    }
    return true;
}

namespace {

double point_segment_distance_sq(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const Vec2 d = len2 == 0.0 ? p - a : p - (a + std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) * ab);
    return dot(d, d);
}

}  // namespace

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) { return std::sqrt(point_segment_distance_sq(p, a, b)); }

double point_polygon_distance(std::span<const Vec2> convex_ccw, Vec2 p) {
    if (contains_point(convex_ccw, p)) {
        return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = convex_ccw.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, point_segment_distance(p, convex_ccw[i], convex_ccw[(i + 1) % n]));
    }
    return best;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    const int o1 = orientation(a0, a1, b0);
    const int o2 = orientation(a0, a1, b1);
    const int o3 = orientation(b0, b1, a0);
    const int o4 = orientation(b0, b1, a1);
    if (o1 != o2 && o3 != o4) {
        return true;
    }
    return (o1 == 0 && on_segment(a0, a1, b0)) || (o2 == 0 && on_segment(a0, a1, b1)) ||
           (o3 == 0 && on_segment(b0, b1, a0)) || (o4 == 0 && on_segment(b0, b1, a1));
}

double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    if (segments_intersect(a0, a1, b0, b1)) {
        return 0.0;
    }
    return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                     point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

Polygon clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
    Polygon output(subject.begin(), subject.end());
    const std::size_t m = clip.size();
    for (std::size_t e = 0; e < m && !output.empty(); ++e) {
        const Vec2 c0 = clip[e];
        const Vec2 c1 = clip[(e + 1) % m];
        const Vec2 edge = c1 - c0;
        const auto side = [&](Vec2 p) { return cross(edge, p - c0); };

        Polygon input = std::move(output);
        output.clear();
        Vec2 prev = input.back();
        double prev_side = side(prev);
        for (const Vec2& cur : input) {
            const double cur_side = side(cur);
            if (cur_side >= 0.0) {
                if (prev_side < 0.0) {
                    const double t = prev_side / (prev_side - cur_side);
                    output.push_back(prev + t * (cur - prev));
                }
                output.push_back(cur);
            } else if (prev_side >= 0.0) {
                const double t = prev_side / (prev_side - cur_side);
                output.push_back(prev + t * (cur - prev));
            }
            prev = cur;
            prev_side = cur_side;
        }
    }
    return output;
}

double intersection_area(std::span<const Vec2> a, std::span<const Vec2> b) {
    const Aabb2 ba = bounding_box(a);
    const Aabb2 bb = bounding_box(b);
    if (ba.hi.x <= bb.lo.x || bb.hi.x <= ba.lo.x || ba.hi.y <= bb.lo.y || bb.hi.y <= ba.lo.y) {
        return 0.0;
    }
    const Polygon clipped = clip_convex(a, b);
    if (clipped.size() < 3) {
        return 0.0;
    }
    return std::max(0.0, signed_area(clipped));
}

namespace {

// True when some edge normal of `a` strictly separates the two polygons.
bool separated_by_edges_of(std::span<const Vec2> a, std::span<const Vec2> b) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = a[(i + 1) % n] - a[i];
        const Vec2 axis{e.y, -e.x};  // outward for counterclockwise order
        const double limit = dot(axis, a[i]);
        bool all_outside = true;
        for (const Vec2& v : b) {
            if (dot(axis, v) <= limit) {
                all_outside = false;
                break;
            }
        }
        if (all_outside) {
            return true;
        }
    }
    return false;
}

double vertex_edge_distance_sq(std::span<const Vec2> from, std::span<const Vec2> to) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = to.size();
    for (const Vec2& v : from) {
        for (std::size_t j = 0; j < n; ++j) {
            best = std::min(best, point_segment_distance_sq(v, to[j], to[(j + 1) % n]));
        }
    }
    return best;
}

}  // namespace

double polygon_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
    if (!separated_by_edges_of(a, b) && !separated_by_edges_of(b, a)) {
        return 0.0;  // intersecting or touching
    }
    // disjoint convex polygons are closest at a vertex of one and an edge of the other
    return std::sqrt(std::min(vertex_edge_distance_sq(a, b), vertex_edge_distance_sq(b, a)));
}

double diameter(std::span<const Vec2> poly) {
    double best = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        for (std::size_t j = i + 1; j < poly.size(); ++j) {
            best = std::max(best, norm(poly[i] - poly[j]));
        }
    }
    return best;
}

Vec2 centroid(std::span<const Vec2> poly) {
    const double area = signed_area(poly);
    if (area == 0.0) {
        Vec2 mean;
        for (const Vec2& p : poly) {
            mean = mean + p;
        }
        return (1.0 / static_cast<double>(poly.size())) * mean;
    }
    double cx = 0.0;
    double cy = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = poly[i];
        const Vec2 q = poly[(i + 1) % n];
        const double w = cross(p, q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (6.0 * area), cy / (6.0 * area)};
}

}  // namespace layoutforge
