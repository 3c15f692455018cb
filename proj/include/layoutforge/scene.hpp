#pragma once

#include <array>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "layoutforge/geometry.hpp"

namespace layoutforge {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps any finite angle to [0, 2*pi).
double wrap_angle(double radians);

/// Maps any finite angle difference to (-pi, pi].
double wrap_difference(double radians);

/// Shortest distance between two angles on the circle, in [0, pi].
double angular_distance(double a, double b);

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Position in meters plus intrinsic yaw (z), pitch (y), roll (x) Euler
/// angles. Angles are always stored wrapped to [0, 2*pi).
class Pose {
public:
    Pose() = default;
    Pose(double x, double y, double z, double yaw = 0.0, double pitch = 0.0, double roll = 0.0);

    static Pose identity() { return {}; }

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }
    double yaw() const { return yaw_; }
    double pitch() const { return pitch_; }
    double roll() const { return roll_; }

    Vec3 position() const { return {x_, y_, z_}; }
    Vec2 xy() const { return {x_, y_}; }

    Pose with_position(double x, double y, double z) const;
    Pose with_xy(double x, double y) const { return with_position(x, y, z_); }
    Pose with_z(double z) const { return with_position(x_, y_, z); }
    Pose with_yaw(double yaw) const;
    Pose with_angles(double yaw, double pitch, double roll) const;

    /// Pitch and roll are zero (within 1e-12 on the circle).
    bool upright() const;

    /// Rz(yaw) * Ry(pitch) * Rx(roll).
    Mat3 rotation() const;

    friend bool operator==(const Pose&, const Pose&) = default;

private:
    double x_ = 0.0;
    double y_ = 0.0;
    double z_ = 0.0;
    double yaw_ = 0.0;
    double pitch_ = 0.0;
    double roll_ = 0.0;
};

/// Full side lengths of a bounding box in its local frame.
struct Extent {
    double dx = 1.0;
    double dy = 1.0;
    double dz = 1.0;

    bool valid() const;
    friend bool operator==(const Extent&, const Extent&) = default;
};

/// Convex counterclockwise ground-plane region with a ceiling height.
struct Domain {
    Polygon boundary;
    double height = 0.0;

    static Domain rectangle(double width, double depth, double height);
    static Domain centered_rectangle(double width, double depth, double height);

    /// Empty when the domain is well formed.
    std::vector<std::string> problems() const;
    double diagonal() const { return diameter(boundary); }

    friend bool operator==(const Domain&, const Domain&) = default;
};

struct PlacedBox {
    Pose pose;
    Extent extent;

    Vec3 center() const { return pose.position(); }
};

struct ObjectNode {
    std::string id;
    std::string category;
    Extent extent;
    Pose local_pose;
    bool fixed = false;
    std::vector<ObjectNode> children;

    friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

/// The domain frame is the parent of every root-level object.
struct SceneTree {
    Domain domain;
    std::vector<ObjectNode> roots;

    const ObjectNode* find(std::string_view id) const;
    ObjectNode* find(std::string_view id);
    /// Id of the node's parent; nullopt for root-level nodes and unknown ids.
    std::optional<std::string> parent_of(std::string_view id) const;

    friend bool operator==(const SceneTree&, const SceneTree&) = default;
};

/// Pose assignment for the objects of one subproblem, in a stable order.
class Layout {
public:
    Layout() = default;
    Layout(std::vector<std::string> ids, std::vector<Pose> poses);

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<Pose>& poses() const { return poses_; }

    bool contains(std::string_view id) const;
    /// Throws std::out_of_range("unknown object: <id>").
    const Pose& at(std::string_view id) const;
    void set(std::string_view id, const Pose& pose);

    friend bool operator==(const Layout&, const Layout&) = default;

private:
    std::vector<std::string> ids_;
    std::vector<Pose> poses_;
};

Pose compose_pose(const Pose& parent, const Pose& child_local);

/// Inverse transform, so that compose_pose(parent, relative_pose(parent, w)) == w.
Pose relative_pose(const Pose& parent, const Pose& world);

/// Corners of the ground-plane footprint, counterclockwise. Throws
/// std::domain_error for tilted poses.
Quad world_footprint(const Pose& pose, const Extent& extent);

std::pair<double, double> vertical_interval(const Pose& pose, const Extent& extent);

/// Local z of a child whose bottom face rests on the parent's top face. With
/// no parent the support surface is the domain floor at z = 0.
double support_z(const Extent& child, const std::optional<Extent>& parent);

struct Diagnostic {
    std::string node_id;
    std::string message;
};

struct ValidationReport {
    std::vector<Diagnostic> diagnostics;
    /// Input tree with every local z set by the support rule.
    SceneTree tree;

    bool ok() const { return diagnostics.empty(); }
};

ValidationReport validate_tree(const SceneTree& tree);

/// World pose of every node, composed along the path from the domain frame.
std::map<std::string, Pose> world_poses(const SceneTree& tree);

}  // namespace layoutforge
