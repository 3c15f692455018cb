#include <gtest/gtest.h>

#include <random>

#include "layoutforge/geometry.hpp"

using namespace layoutforge;

namespace {
const Polygon kUnit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
Polygon shifted(const Polygon& p, Vec2 d) {
    Polygon out;
    for (Vec2 v : p) out.push_back(v + d);
    return out;
}
}  // namespace

TEST(Geometry, SignedAreaAndConvexity) {
    EXPECT_DOUBLE_EQ(signed_area(kUnit), 1.0);
    EXPECT_TRUE(is_convex_ccw(kUnit));
    const Polygon cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    EXPECT_FALSE(is_convex_ccw(cw));
    const Polygon dart{{0, 0}, {2, 0}, {1, 0.5}, {1, 2}};
    EXPECT_FALSE(is_convex_ccw(dart));
}

TEST(Geometry, ContainsPointBoundaryCounts) {
    EXPECT_TRUE(contains_point(kUnit, {0.5, 0.5}));
    EXPECT_TRUE(contains_point(kUnit, {1.0, 0.5}));
    EXPECT_FALSE(contains_point(kUnit, {1.0, 0.5}, -1e-12));
    EXPECT_FALSE(contains_point(kUnit, {1.1, 0.5}));
}

TEST(Geometry, PointDistances) {
    EXPECT_DOUBLE_EQ(point_segment_distance({0, 1}, {-1, 0}, {1, 0}), 1.0);
    EXPECT_DOUBLE_EQ(point_segment_distance({3, 4}, {0, 0}, {0, 0}), 5.0);
    EXPECT_DOUBLE_EQ(point_polygon_distance(kUnit, {0.5, 0.5}), 0.0);
    EXPECT_DOUBLE_EQ(point_polygon_distance(kUnit, {2, 1}), 1.0);
}

TEST(Geometry, ClipAndArea) {
    EXPECT_NEAR(intersection_area(kUnit, kUnit), 1.0, 1e-15);
    EXPECT_NEAR(intersection_area(kUnit, shifted(kUnit, {0.5, 0.5})), 0.25, 1e-15);
    EXPECT_EQ(intersection_area(kUnit, shifted(kUnit, {2, 0})), 0.0);
    EXPECT_NEAR(intersection_area(kUnit, shifted(kUnit, {1, 0})), 0.0, 1e-15);
}

TEST(Geometry, PolygonDistance) {
    EXPECT_DOUBLE_EQ(polygon_distance(kUnit, shifted(kUnit, {3, 0})), 2.0);
    EXPECT_DOUBLE_EQ(polygon_distance(kUnit, shifted(kUnit, {0.5, 0.2})), 0.0);
    EXPECT_DOUBLE_EQ(polygon_distance(kUnit, shifted(kUnit, {1, 0})), 0.0);
    const Polygon big{{-5, -5}, {5, -5}, {5, 5}, {-5, 5}};
    EXPECT_DOUBLE_EQ(polygon_distance(big, kUnit), 0.0);  // nested
}

TEST(Geometry, IntersectionAreaMatchesGridCount) {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int trial = 0; trial < 20; ++trial) {
        const Polygon tri{{u(gen), -1}, {1, u(gen)}, {u(gen), 1}};
        const Polygon sq = shifted(Polygon{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}, {u(gen), u(gen)});
        const int n = 600;
        int hits = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Vec2 p{-2 + 4 * (i + 0.5) / n, -2 + 4 * (j + 0.5) / n};
                hits += contains_point(tri, p) && contains_point(sq, p);
            }
        EXPECT_NEAR(intersection_area(tri, sq), 16.0 * hits / (n * n), 0.02);
    }
}
