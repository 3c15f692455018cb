#include "layoutforge/trajectory.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "layoutforge/format.hpp"

namespace layoutforge {

namespace {

constexpr std::array<std::string_view, 5> kTemplateNames{"pan", "orbit", "dolly", "crane", "static"};
constexpr std::array<std::string_view, 7> kRelationNames{"in_front_of", "behind",      "left_of", "right_of",
                                                         "above",       "centered_on", "around"};
constexpr Vec3 kUp{0.0, 0.0, 1.0};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == name) {
            return static_cast<Enum>(i);
        }
    }
    return std::nullopt;
}

Vec3 normalized(Vec3 v) { return (1.0 / norm(v)) * v; }

}  // namespace

std::string_view to_string(TrajectoryTemplate t) { return kTemplateNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(AnchorRelation r) { return kRelationNames[static_cast<std::size_t>(r)]; }

std::optional<TrajectoryTemplate> trajectory_template_from_string(std::string_view name) {
    return lookup<TrajectoryTemplate>(kTemplateNames, name);
}

std::optional<AnchorRelation> anchor_relation_from_string(std::string_view name) {
    return lookup<AnchorRelation>(kRelationNames, name);
}

std::vector<std::string> TrajectoryCommand::problems() const {
    std::vector<std::string> out;
    const int min_frames = kind == TrajectoryTemplate::Static ? 1 : 2;
    if (frames < min_frames) {
        out.push_back(std::string(to_string(kind)) + " needs at least " + std::to_string(min_frames) + " frames");
    }
    const auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            out.push_back(std::string(name) + " must be positive");
        }
    };
    switch (kind) {
    case TrajectoryTemplate::Pan:
        positive(span, "span");
        break;
    case TrajectoryTemplate::Orbit:
        positive(arc, "arc");
        break;
    case TrajectoryTemplate::Dolly:
        positive(travel, "travel");
        break;
    case TrajectoryTemplate::Crane:
        positive(rise, "rise");
        break;
    case TrajectoryTemplate::Static:
        break;
    }
    if (anchor.distance) {
        positive(*anchor.distance, "anchor distance");
    }
    if (anchor.relation == AnchorRelation::Around && kind != TrajectoryTemplate::Orbit) {
        out.emplace_back("around anchors are only valid for orbit");
    }
    if (anchor.object.empty()) {
        out.emplace_back("anchor object missing");
    }
    return out;
}

Vec3 object_front(const Pose& pose) { return {-std::sin(pose.yaw()), std::cos(pose.yaw()), 0.0}; }

AnchorFrame anchor_frame(const Pose& world_pose, const Extent& extent, AnchorRelation relation,
                         std::optional<double> distance) {
    if (!world_pose.upright()) {
        throw std::domain_error("anchor undefined for tilted object");
    }
    const double d = distance.value_or(1.5 * std::max(extent.dx, extent.dy));
    const Vec3 c = world_pose.position();
    const Vec3 front = object_front(world_pose);
    const Vec3 side = cross(front, kUp);  // the object's own right

    AnchorFrame f;
    f.center = c;
    f.distance = d;
    switch (relation) {
    case AnchorRelation::InFrontOf:
        f.origin = c + d * front;
        f.facing = -1.0 * front;
        break;
    case AnchorRelation::Behind:
        f.origin = c - d * front;
        f.facing = front;
        break;
    case AnchorRelation::RightOf:
        f.origin = c + d * side;
        f.facing = -1.0 * side;
        break;
    case AnchorRelation::LeftOf:
        f.origin = c - d * side;
        f.facing = side;
        break;
    case AnchorRelation::Above:
        f.origin = c + Vec3{0.0, 0.0, d};
        f.facing = Vec3{0.0, 0.0, -1.0};
        break;
    case AnchorRelation::CenteredOn:
    case AnchorRelation::Around:
        f.origin = c;
        f.facing = front;
        break;
    }
    // looking straight down has no horizontal right; borrow the object's
    f.right = relation == AnchorRelation::Above ? side : cross(f.facing, kUp);
    return f;
}

namespace {

// cos and sin that are exact at multiples of a quarter turn, so compass
// points of an orbit carry no rounding residue
std::pair<double, double> quarter_exact_cos_sin(double angle) {
    const double quarters = angle / (std::numbers::pi / 2.0);
    const double k = std::round(quarters);
    if (std::abs(quarters - k) < 1e-12) {
        static constexpr std::array<std::pair<double, double>, 4> kCompass{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
        const long m = static_cast<long>(k) % 4;
        return kCompass[static_cast<std::size_t>(m < 0 ? m + 4 : m)];
    }
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

std::vector<Keyframe> build_trajectory(const TrajectoryCommand& command, const AnchorFrame& frame) {
    const auto issues = command.problems();
    if (!issues.empty()) {
        throw std::invalid_argument("invalid trajectory command: " + issues.front());
    }
    const int n = command.frames;
    std::vector<Keyframe> out;
    out.reserve(static_cast<std::size_t>(n));
    const auto time = [n](int i) { return n == 1 ? 0.0 : static_cast<double>(i) / (n - 1); };
    const auto look = [&](Vec3 position) {
        return position == frame.center ? position + frame.facing : frame.center;
    };

    switch (command.kind) {
    case TrajectoryTemplate::Pan: {
        const Vec3 start = frame.origin - (command.span / 2.0) * frame.right;
        for (int i = 0; i < n; ++i) {
            const Vec3 p = start + (command.span * time(i)) * frame.right;
            out.push_back({time(i), p, frame.center});
        }
        // the end point is computed directly so both ends are exactly symmetric
        out.back().position = frame.origin + (command.span / 2.0) * frame.right;
        break;
    }
    case TrajectoryTemplate::Orbit: {
        Vec3 radial = frame.origin - frame.center;
        radial.z = 0.0;
        if (norm(radial) < 1e-12) {
            radial = frame.facing;
            radial.z = 0.0;
            if (norm(radial) < 1e-12) {
                radial = frame.right;
            }
        }
        radial = normalized(radial);
        const bool full = command.arc >= 2.0 * std::numbers::pi - 1e-12;
        for (int i = 0; i < n; ++i) {
            const double step = full ? static_cast<double>(i) / n : time(i);
            const auto [c, s] = quarter_exact_cos_sin(command.arc * step);
            const Vec3 p{frame.center.x + frame.distance * (c * radial.x - s * radial.y),
                         frame.center.y + frame.distance * (s * radial.x + c * radial.y), frame.center.z};
            out.push_back({time(i), p, frame.center});
        }
        break;
    }
    case TrajectoryTemplate::Dolly: {
        const Vec3 start = frame.origin - command.travel * frame.facing;
        for (int i = 0; i < n; ++i) {
            const Vec3 p = i == n - 1 ? frame.origin : start + (command.travel * time(i)) * frame.facing;
            out.push_back({time(i), p, look(p)});
        }
        break;
    }
    case TrajectoryTemplate::Crane: {
        for (int i = 0; i < n; ++i) {
            const Vec3 p = frame.origin + Vec3{0.0, 0.0, command.rise * time(i)};
            out.push_back({time(i), p, look(p)});
        }
        break;
    }
    case TrajectoryTemplate::Static:
        for (int i = 0; i < n; ++i) {
            out.push_back({time(i), frame.origin, look(frame.origin)});
        }
        break;
    }
    return out;
}

std::vector<Keyframe> apply_to_object(std::vector<Keyframe> keyframes, double original_yaw, bool yaw_hold) {
    if (yaw_hold || keyframes.size() < 2) {
        for (Keyframe& k : keyframes) {
            k.yaw = wrap_angle(original_yaw);
        }
        return keyframes;
    }
    double heading = wrap_angle(original_yaw);
    for (std::size_t i = 0; i + 1 < keyframes.size(); ++i) {
        const Vec3 v = keyframes[i + 1].position - keyframes[i].position;
        // vertical or zero motion keeps the previous heading
        if (std::hypot(v.x, v.y) > 1e-12) {
            heading = wrap_angle(std::atan2(v.y, v.x) - std::numbers::pi / 2.0);
        }
        keyframes[i].yaw = heading;
    }
    keyframes.back().yaw = heading;
    return keyframes;
}

std::vector<Keyframe> plan_trajectory(const TrajectoryCommand& command, const SceneTree& tree) {
    const ObjectNode* anchor = tree.find(command.anchor.object);
    if (anchor == nullptr) {
        throw std::out_of_range("unknown object: " + command.anchor.object);
    }
    const auto world = world_poses(tree);
    const AnchorFrame frame =
        anchor_frame(world.at(anchor->id), anchor->extent, command.anchor.relation, command.anchor.distance);
    std::vector<Keyframe> keys = build_trajectory(command, frame);
    if (const auto* subject = std::get_if<ObjectSubject>(&command.subject)) {
        const auto it = world.find(subject->id);
        if (it == world.end()) {
            throw std::out_of_range("unknown object: " + subject->id);
        }
        keys = apply_to_object(std::move(keys), it->second.yaw(), subject->yaw_hold);
    }
    return keys;
}

void export_track(std::ostream& out, const std::vector<Keyframe>& keyframes, double fps, TrackKind kind,
                  std::string_view subject_name) {
    if (keyframes.empty()) {
        throw std::invalid_argument("empty track");
    }
    if (!(fps > 0.0) || !std::isfinite(fps)) {
        throw std::invalid_argument("fps must be positive");
    }
    const auto num = [](double v) { return format_fixed(v, 9); };
    out << "# layoutforge-track subject=";
    if (kind == TrackKind::Camera) {
        out << "camera";
    } else {
        out << "object:" << subject_name;
    }
    out << " fps=" << format_double(fps) << " frames=" << keyframes.size() << '\n';
    const double last = static_cast<double>(keyframes.size() - 1);
    for (const Keyframe& k : keyframes) {
        out << static_cast<long>(std::llround(k.t * last)) << ' ' << num(k.position.x) << ' ' << num(k.position.y)
            << ' ' << num(k.position.z);
        if (kind == TrackKind::Camera) {
            out << ' ' << num(k.look_at.x) << ' ' << num(k.look_at.y) << ' ' << num(k.look_at.z);
        } else {
            out << ' ' << num(k.yaw);
        }
        out << '\n';
    }
}

}  // namespace layoutforge
