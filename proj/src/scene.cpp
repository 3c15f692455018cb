#include "layoutforge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace layoutforge {

double wrap_angle(double radians) {
    double r = std::fmod(radians, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    // fmod of a tiny negative value can round up to exactly 2*pi
    if (r >= kTwoPi) {
        r = 0.0;
    }
    return r;
}

double wrap_difference(double radians) {
    double r = wrap_angle(radians);
    if (r > std::numbers::pi) {
        r -= kTwoPi;
    }
    return r;
}

double angular_distance(double a, double b) { return std::abs(wrap_difference(a - b)); }

namespace {

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("pose field is not finite: ") + field);
    }
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    return out;
}

Mat3 transpose(const Mat3& a) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out[i][j] = a[j][i];
        }
    }
    return out;
}

Vec3 apply(const Mat3& m, Vec3 v) {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

struct Euler {
    double yaw;
    double pitch;
    double roll;
};

Euler extract_euler(const Mat3& r) {
    const double s = std::clamp(-r[2][0], -1.0, 1.0);
    if (std::abs(s) > 1.0 - 1e-12) {
        // gimbal lock: only yaw - roll (or yaw + roll) is observable; put it all in yaw
        const double pitch = s > 0.0 ? std::numbers::pi / 2.0 : -std::numbers::pi / 2.0;
        return {std::atan2(-r[0][1], r[1][1]), pitch, 0.0};
    }
    return {std::atan2(r[1][0], r[0][0]), std::asin(s), std::atan2(r[2][1], r[2][2])};
}

bool zero_rotation(const Pose& p) { return p.yaw() == 0.0 && p.pitch() == 0.0 && p.roll() == 0.0; }

}  // namespace

Pose::Pose(double x, double y, double z, double yaw, double pitch, double roll) {
    require_finite(x, "x");
    require_finite(y, "y");
    require_finite(z, "z");
    require_finite(yaw, "yaw");
    require_finite(pitch, "pitch");
    require_finite(roll, "roll");
    x_ = x;
    y_ = y;
    z_ = z;
    yaw_ = wrap_angle(yaw);
    pitch_ = wrap_angle(pitch);
    roll_ = wrap_angle(roll);
}

Pose Pose::with_position(double x, double y, double z) const { return {x, y, z, yaw_, pitch_, roll_}; }

Pose Pose::with_yaw(double yaw) const { return {x_, y_, z_, yaw, pitch_, roll_}; }

Pose Pose::with_angles(double yaw, double pitch, double roll) const { return {x_, y_, z_, yaw, pitch, roll}; }

bool Pose::upright() const { return angular_distance(pitch_, 0.0) <= 1e-12 && angular_distance(roll_, 0.0) <= 1e-12; }

Mat3 Pose::rotation() const {
    const double cy = std::cos(yaw_), sy = std::sin(yaw_);
    const double cp = std::cos(pitch_), sp = std::sin(pitch_);
    const double cr = std::cos(roll_), sr = std::sin(roll_);
    return {{{cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr},
             {sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr},
             {-sp, cp * sr, cp * cr}}};
}

bool Extent::valid() const {
    return std::isfinite(dx) && std::isfinite(dy) && std::isfinite(dz) && dx > 0.0 && dy > 0.0 && dz > 0.0;
}

Domain Domain::rectangle(double width, double depth, double height) {
    return {{{0.0, 0.0}, {width, 0.0}, {width, depth}, {0.0, depth}}, height};
}

Domain Domain::centered_rectangle(double width, double depth, double height) {
    const double hx = width / 2.0;
    const double hy = depth / 2.0;
    return {{{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}}, height};
}

std::vector<std::string> Domain::problems() const {
    std::vector<std::string> out;
    if (boundary.size() < 3) {
        out.emplace_back("domain boundary needs at least 3 vertices");
    } else if (!is_convex_ccw(boundary)) {
        out.emplace_back("domain boundary must be convex and counterclockwise");
    }
    for (const Vec2& v : boundary) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
            out.emplace_back("domain boundary has a non-finite vertex");
            break;
        }
    }
    if (!(height > 0.0) || !std::isfinite(height)) {
        out.emplace_back("domain height must be positive");
    }
    return out;
}

namespace {

template <typename Nodes>
auto find_in(Nodes& nodes, std::string_view id) -> decltype(&nodes.front()) {
    for (auto& n : nodes) {
        if (n.id == id) {
            return &n;
        }
        if (auto* hit = find_in(n.children, id)) {
            return hit;
        }
    }
    return nullptr;
}

bool parent_search(const std::vector<ObjectNode>& nodes, std::string_view id, const std::string& parent,
                   std::optional<std::string>& out) {
    for (const ObjectNode& n : nodes) {
        if (n.id == id) {
            out = parent.empty() ? std::nullopt : std::optional<std::string>(parent);
            return true;
        }
        if (parent_search(n.children, id, n.id, out)) {
            return true;
        }
    }
    return false;
}

}  // namespace

const ObjectNode* SceneTree::find(std::string_view id) const {
    return find_in(roots, id);
}

ObjectNode* SceneTree::find(std::string_view id) { return find_in(roots, id); }

std::optional<std::string> SceneTree::parent_of(std::string_view id) const {
    std::optional<std::string> out;
    parent_search(roots, id, "", out);
    return out;
}

Layout::Layout(std::vector<std::string> ids, std::vector<Pose> poses) : ids_(std::move(ids)), poses_(std::move(poses)) {
    if (ids_.size() != poses_.size()) {
        throw std::invalid_argument("layout ids and poses differ in length");
    }
}

bool Layout::contains(std::string_view id) const { return std::find(ids_.begin(), ids_.end(), id) != ids_.end(); }

const Pose& Layout::at(std::string_view id) const {
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) {
        throw std::out_of_range("unknown object: " + std::string(id));
    }
    return poses_[static_cast<std::size_t>(it - ids_.begin())];
}

void Layout::set(std::string_view id, const Pose& pose) {
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) {
        ids_.emplace_back(id);
        poses_.push_back(pose);
        return;
    }
    poses_[static_cast<std::size_t>(it - ids_.begin())] = pose;
}

Pose compose_pose(const Pose& parent, const Pose& child_local) {
    if (parent.upright() && child_local.upright()) {
        const double c = std::cos(parent.yaw());
        const double s = std::sin(parent.yaw());
        const Vec3 p = child_local.position();
        return {parent.x() + c * p.x - s * p.y, parent.y() + s * p.x + c * p.y, parent.z() + p.z,
                parent.yaw() + child_local.yaw()};
    }
    const Mat3 rp = parent.rotation();
    const Vec3 pos = parent.position() + apply(rp, child_local.position());
    if (zero_rotation(parent)) {
        return Pose(pos.x, pos.y, pos.z).with_angles(child_local.yaw(), child_local.pitch(), child_local.roll());
    }
    if (zero_rotation(child_local)) {
        return Pose(pos.x, pos.y, pos.z).with_angles(parent.yaw(), parent.pitch(), parent.roll());
    }
    const Euler e = extract_euler(multiply(rp, child_local.rotation()));
    return {pos.x, pos.y, pos.z, e.yaw, e.pitch, e.roll};
}

Pose relative_pose(const Pose& parent, const Pose& world) {
    const Vec3 d = world.position() - parent.position();
    if (parent.upright() && world.upright()) {
        const double c = std::cos(parent.yaw());
        const double s = std::sin(parent.yaw());
        return {c * d.x + s * d.y, -s * d.x + c * d.y, d.z, world.yaw() - parent.yaw()};
    }
    const Mat3 rt = transpose(parent.rotation());
    const Vec3 p = apply(rt, d);
    const Euler e = extract_euler(multiply(rt, world.rotation()));
    return {p.x, p.y, p.z, e.yaw, e.pitch, e.roll};
}

Quad world_footprint(const Pose& pose, const Extent& extent) {
    if (!pose.upright()) {
        throw std::domain_error("footprint undefined for tilted object");
    }
    const double c = std::cos(pose.yaw());
    const double s = std::sin(pose.yaw());
    const double hx = extent.dx / 2.0;
    const double hy = extent.dy / 2.0;
    const std::array<Vec2, 4> local{{{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}}};
    Quad out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = {pose.x() + c * local[i].x - s * local[i].y, pose.y() + s * local[i].x + c * local[i].y};
    }
    return out;
}

std::pair<double, double> vertical_interval(const Pose& pose, const Extent& extent) {
    return {pose.z() - extent.dz / 2.0, pose.z() + extent.dz / 2.0};
}

double support_z(const Extent& child, const std::optional<Extent>& parent) {
    const double surface = parent ? parent->dz / 2.0 : 0.0;
    return surface + child.dz / 2.0;
}

ValidationReport validate_tree(const SceneTree& tree) {
    ValidationReport report;
    report.tree = tree;
    for (const std::string& p : tree.domain.problems()) {
        report.diagnostics.push_back({"", p});
    }

    std::set<std::string> seen;
    std::function<void(ObjectNode&, const ObjectNode*)> visit = [&](ObjectNode& node, const ObjectNode* parent) {
        if (node.id.empty()) {
            report.diagnostics.push_back({node.id, "empty id"});
        } else if (!seen.insert(node.id).second) {
            report.diagnostics.push_back({node.id, "duplicate id"});
        }
        if (!node.extent.valid()) {
            report.diagnostics.push_back({node.id, "non-positive extent"});
        }
        if (parent != nullptr && node.extent.valid() && parent->extent.valid() &&
            node.extent.dx * node.extent.dy > parent->extent.dx * parent->extent.dy) {
            report.diagnostics.push_back({node.id, "footprint larger than parent top surface of " + parent->id});
        }
        const std::optional<Extent> parent_extent =
            parent ? std::optional<Extent>(parent->extent) : std::nullopt;
        node.local_pose = node.local_pose.with_z(support_z(node.extent, parent_extent));
        for (ObjectNode& child : node.children) {
            visit(child, &node);
        }
    };
    for (ObjectNode& root : report.tree.roots) {
        visit(root, nullptr);
    }
    return report;
}

std::map<std::string, Pose> world_poses(const SceneTree& tree) {
    std::map<std::string, Pose> out;
    std::function<void(const ObjectNode&, const Pose&)> visit = [&](const ObjectNode& node, const Pose& frame) {
        const Pose world = compose_pose(frame, node.local_pose);
        out.emplace(node.id, world);
        for (const ObjectNode& child : node.children) {
            visit(child, world);
        }
    };
    for (const ObjectNode& root : tree.roots) {
        visit(root, Pose::identity());
    }
    return out;
}

}  // namespace layoutforge
