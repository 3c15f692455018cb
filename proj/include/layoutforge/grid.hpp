#pragma once

#include <numbers>
#include <vector>

#include "layoutforge/scene.hpp"

namespace layoutforge {

/// Discrete pose grid shared by the brute-force oracle and snap-only
/// annealing: square cells of side `xy_step` tiling the domain's bounding
/// box from its lower-left corner, times a finite yaw set.
struct GridSpec {
    double xy_step = 0.25;
    std::vector<double> yaw_set{0.0, std::numbers::pi / 2.0, std::numbers::pi, 3.0 * std::numbers::pi / 2.0};
    std::size_t max_objects = 3;

    bool valid() const { return xy_step > 0.0 && !yaw_set.empty(); }
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class PoseGrid {
public:
    PoseGrid(const Domain& domain, GridSpec spec);

    const GridSpec& spec() const { return spec_; }
    std::size_t columns() const { return nx_; }
    std::size_t rows() const { return ny_; }
    Vec2 center(std::size_t ix, std::size_t iy) const;

    /// Cell centers lying strictly inside the domain, ordered by (x, y).
    std::vector<Vec2> interior_centers() const;

    /// Nearest cell center (clamped to the grid).
    Vec2 snap(Vec2 p) const;
    /// Nearest yaw of the yaw set on the circle.
    double snap_yaw(double yaw) const;

private:
    Polygon boundary_;
    GridSpec spec_;
    Vec2 origin_;
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
};

}  // namespace layoutforge
