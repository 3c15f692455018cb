#include <gtest/gtest.h>

#include <chrono>
#include <numbers>

#include "layoutforge/oracle.hpp"

using namespace layoutforge;
constexpr double kPi = std::numbers::pi;

namespace {

RelationTerm soft_distance(std::string a, std::string b, double target = 0.0) {
    RelationTerm t;
    t.kind = RelationKind::Distance;
    t.participants = {std::move(a), std::move(b)};
    t.params.target = target;
    return t;
}

// Brute force without pruning or tabulation.
std::pair<double, std::vector<Pose>> naive_best(const LayoutProblem& p, const GridSpec& spec) {
    const auto cands = oracle_candidates(p, PoseGrid(p.domain(), spec));
    std::vector<Pose> poses = p.base_poses();
    double best = INFINITY;
    std::vector<Pose> arg;
    const auto& mov = p.movable();
    std::vector<std::size_t> idx(mov.size(), 0);
    while (true) {
        for (std::size_t k = 0; k < mov.size(); ++k) poses[mov[k]] = cands[mov[k]][idx[k]];
        const Breakdown b = evaluate(p, poses);
        if (is_feasible(b) && b.objective < best - 1e-12) {
            best = b.objective;
            arg = poses;
        }
        std::size_t k = mov.size();
        while (k > 0) {
            --k;
            if (++idx[k] < cands[mov[k]].size()) break;
            idx[k] = 0;
            if (k == 0) return {best, arg};
        }
    }
}

}  // namespace

TEST(Oracle, SingleObjectFindsMarkerNode) {
    SceneTree t;
    t.domain = Domain::rectangle(4, 4, 3);
    t.roots.push_back(ObjectNode{"marker", "m", Extent{0.1, 0.1, 0.1}, Pose(2.75, 1.25, 0), true});
    t.roots.push_back(ObjectNode{"obj", "m", Extent{0.1, 0.1, 0.1}, Pose(0, 0, 0)});
    AutoRules rules;
    rules.collision_exempt = {{"obj", "marker"}};
    RelationTerm d = soft_distance("obj", "marker");
    const LayoutProblem p = assemble(validate_tree(t).tree, std::nullopt, std::vector<RelationTerm>{d}, rules);
    const Solution s = oracle_solve(p, GridSpec{0.5});
    EXPECT_TRUE(s.feasible);
    EXPECT_EQ(s.breakdown.objective, 0.0);
    EXPECT_EQ(s.layout.at("obj").xy(), (Vec2{2.75, 1.25}));
    EXPECT_EQ(s.layout.at("obj").yaw(), 0.0);  // ties resolve to the first yaw
}

TEST(Oracle, AdjacentCubesMatchHandEnumeration) {
    SceneTree t;
    t.domain = Domain::rectangle(2, 2, 3);  // 4x4 grid at 0.5
    t.roots.push_back(ObjectNode{"a", "cube", Extent{0.5, 0.5, 0.5}, Pose(0, 0, 0)});
    t.roots.push_back(ObjectNode{"b", "cube", Extent{0.5, 0.5, 0.5}, Pose(0, 0, 0)});
    RelationTerm far = soft_distance("a", "b", 1.0);
    const LayoutProblem p =
        assemble(validate_tree(t).tree, std::nullopt, std::vector<RelationTerm>{far, proximity_constraint("a", "b")});
    const Solution s = oracle_solve(p, GridSpec{0.5});
    ASSERT_TRUE(s.feasible);
    // adjacent cells touch, so the gap is 0 and the score is (0 - 1)^2
    EXPECT_DOUBLE_EQ(s.breakdown.objective, 1.0);
    EXPECT_EQ(evaluate(p, s.layout), s.breakdown);
    const Vec2 a = s.layout.at("a").xy(), b = s.layout.at("b").xy();
    EXPECT_DOUBLE_EQ(std::abs(a.x - b.x) + std::abs(a.y - b.y), 0.5);
    // lexicographically first optimal tuple: a at the first cell, b right above it
    EXPECT_EQ(a, (Vec2{0.25, 0.25}));
    EXPECT_EQ(b, (Vec2{0.25, 0.75}));
    const auto [naive, arg] = naive_best(p, GridSpec{0.5});
    EXPECT_DOUBLE_EQ(naive, s.breakdown.objective);
    EXPECT_EQ(p.layout_of(arg), s.layout);
}

TEST(Oracle, TieBreakPicksLexicographicallySmaller) {
    SceneTree t;
    t.domain = Domain::rectangle(1, 2, 3);
    t.roots.push_back(ObjectNode{"mid", "m", Extent{0.1, 0.1, 0.1}, Pose(0.5, 1.0, 0), true});
    t.roots.push_back(ObjectNode{"obj", "m", Extent{0.2, 0.2, 0.1}, Pose(0, 0, 0)});
    // cells (0.5, 0.5) and (0.5, 1.5) are both 0.5 - 0.05 - 0.1 away from the marker
    GridSpec spec{1.0, {0.0}};
    RelationTerm d = soft_distance("obj", "mid");
    const LayoutProblem p = assemble(validate_tree(t).tree, std::nullopt, std::vector<RelationTerm>{d});
    const Solution s = oracle_solve(p, spec);
    EXPECT_EQ(s.layout.at("obj").xy(), (Vec2{0.5, 0.5}));
}

TEST(Oracle, PrunedSearchMatchesNaiveOnThreeObjects) {
    SceneTree t;
    t.domain = Domain::rectangle(2.5, 2.0, 3);
    t.roots.push_back(ObjectNode{"a", "chair", Extent{0.5, 0.5, 0.9}, Pose(0, 0, 0)});
    t.roots.push_back(ObjectNode{"b", "chair", Extent{0.5, 0.5, 0.9}, Pose(0, 0, 0)});
    t.roots.push_back(ObjectNode{"c", "table", Extent{0.9, 0.6, 0.7}, Pose(0, 0, 0)});
    RelationTerm sym;
    sym.kind = RelationKind::Symmetry;
    sym.participants = {"a", "b"};
    sym.params.symmetry = Reflection{{1.25, 1.0}, {1, 0}};
    sym.params.pairs = {{0, 1}};
    RelationTerm orient;
    orient.kind = RelationKind::RelativeOrientation;
    orient.participants = {"a", "c"};
    orient.params.target = kPi / 2;
    const std::vector<RelationTerm> terms{soft_distance("a", "c", 0.3), soft_distance("b", "c", 0.3), sym, orient};
    const LayoutProblem p = assemble(validate_tree(t).tree, std::nullopt, terms);
    const GridSpec spec{0.5};
    const Solution s = oracle_solve(p, spec);
    const auto [naive, arg] = naive_best(p, spec);
    EXPECT_NEAR(s.breakdown.objective, naive, 1e-12);
    EXPECT_EQ(p.layout_of(arg), s.layout);
}

TEST(Oracle, TooLarge) {
    SceneTree t;
    t.domain = Domain::rectangle(20, 20, 3);
    for (const char* id : {"a", "b", "c"}) t.roots.push_back(ObjectNode{id, "x", Extent{}, Pose(0, 0, 0)});
    const LayoutProblem p = assemble(validate_tree(t).tree, std::nullopt, {});
    try {
        oracle_solve(p, GridSpec{0.25});
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "instance too large for oracle");
    }
    GridSpec two{1.0};
    two.max_objects = 2;
    EXPECT_THROW(oracle_solve(p, two), std::invalid_argument);
}

TEST(Oracle, TwoObjectRoomIsFast) {
    SceneTree t;
    t.domain = Domain::rectangle(10, 10, 3);
    t.roots.push_back(ObjectNode{"a", "x", Extent{1.0, 0.6, 0.8}, Pose(0, 0, 0)});
    t.roots.push_back(ObjectNode{"b", "x", Extent{0.7, 0.7, 0.5}, Pose(0, 0, 0)});
    RelationTerm orient;
    orient.kind = RelationKind::RelativeOrientation;
    orient.participants = {"a", "b"};
    orient.params.target = kPi;
    const LayoutProblem p = assemble(validate_tree(t).tree, std::nullopt,
                                     std::vector<RelationTerm>{soft_distance("a", "b", 2.3), proximity_constraint("a", "b", 0.6)});
    const auto t0 = std::chrono::steady_clock::now();
    const Solution s = oracle_solve(p, GridSpec{0.5});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_TRUE(s.feasible);
    EXPECT_LT(secs, 1.5);
}

TEST(MonteCarloArea, Examples) {
    const Polygon unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Polygon off{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
    const Polygon far{{3, 3}, {4, 3}, {4, 4}, {3, 4}};
    const AreaEstimate same = mc_polygon_area(unit, unit, 100000, 1);
    EXPECT_EQ(same.area, 1.0);
    EXPECT_LE(std::abs(same.area - 1.0), 3 * same.standard_error);
    EXPECT_EQ(mc_polygon_area(unit, far, 100000, 1).area, 0.0);
    const AreaEstimate quarter = mc_polygon_area(unit, off, 100000, 2);
    EXPECT_LE(std::abs(quarter.area - 0.25), 3 * quarter.standard_error);
    EXPECT_EQ(quarter.area, mc_polygon_area(unit, off, 100000, 2).area);
}
