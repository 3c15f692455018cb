#pragma once

#include <cstdint>

#include "layoutforge/anneal.hpp"
#include "layoutforge/grid.hpp"

namespace layoutforge {

inline constexpr std::uint64_t kOracleMaxCombinations = 10'000'000;

/// Per-object candidate poses the oracle enumerates: interior cell centers
/// (x-major) times the yaw set, keeping only candidates whose footprint lies
/// inside the domain. Fixed objects get their single fixed pose.
std::vector<std::vector<Pose>> oracle_candidates(const LayoutProblem& problem, const PoseGrid& grid);

/// Exhaustive search over the grid. Among feasible assignments returns the
/// minimal objective, ties going to the lexicographically smallest candidate
/// tuple; with no feasible assignment, minimizes (total violation, objective).
/// Throws std::invalid_argument("instance too large for oracle").
Solution oracle_solve(const LayoutProblem& problem, const GridSpec& grid);

struct AreaEstimate {
    double area = 0.0;
    double standard_error = 0.0;
};

/// Monte-Carlo estimate of the intersection area of two convex polygons from
/// uniform samples over the bounding box of `a`.
AreaEstimate mc_polygon_area(const Polygon& a, const Polygon& b, std::size_t samples, std::uint64_t seed);

}  // namespace layoutforge
