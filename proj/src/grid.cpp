#include "layoutforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace layoutforge {

PoseGrid::PoseGrid(const Domain& domain, GridSpec spec) : boundary_(domain.boundary), spec_(std::move(spec)) {
    if (!spec_.valid()) {
        throw std::invalid_argument("grid needs a positive step and a non-empty yaw set");
    }
    const Aabb2 box = bounding_box(domain.boundary);
    origin_ = box.lo;
    // a tiny slack keeps exact multiples from producing an extra sliver cell
    nx_ = static_cast<std::size_t>(std::max(1.0, std::ceil((box.hi.x - box.lo.x) / spec_.xy_step - 1e-9)));
    ny_ = static_cast<std::size_t>(std::max(1.0, std::ceil((box.hi.y - box.lo.y) / spec_.xy_step - 1e-9)));
}

Vec2 PoseGrid::center(std::size_t ix, std::size_t iy) const {
    return {origin_.x + (static_cast<double>(ix) + 0.5) * spec_.xy_step,
            origin_.y + (static_cast<double>(iy) + 0.5) * spec_.xy_step};
}

std::vector<Vec2> PoseGrid::interior_centers() const {
    std::vector<Vec2> out;
    for (std::size_t ix = 0; ix < nx_; ++ix) {
        for (std::size_t iy = 0; iy < ny_; ++iy) {
            const Vec2 c = center(ix, iy);
            if (contains_point(boundary_, c, -1e-12)) {
                out.push_back(c);
            }
        }
    }
    return out;
}

Vec2 PoseGrid::snap(Vec2 p) const {
    const auto index = [&](double v, double lo, std::size_t count) {
        const double cell = std::floor((v - lo) / spec_.xy_step);
        return static_cast<std::size_t>(std::clamp(cell, 0.0, static_cast<double>(count - 1)));
    };
    return center(index(p.x, origin_.x, nx_), index(p.y, origin_.y, ny_));
}

double PoseGrid::snap_yaw(double yaw) const {
    double best = spec_.yaw_set.front();
    double best_d = angular_distance(yaw, best);
    for (double candidate : spec_.yaw_set) {
        const double d = angular_distance(yaw, candidate);
        if (d < best_d) {
            best_d = d;
            best = candidate;
        }
    }
    return best;
}

}  // namespace layoutforge
