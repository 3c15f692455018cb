#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "layoutforge/scene.hpp"

namespace layoutforge {

enum class TrajectoryTemplate { Pan, Orbit, Dolly, Crane, Static };
enum class AnchorRelation { InFrontOf, Behind, LeftOf, RightOf, Above, CenteredOn, Around };

std::string_view to_string(TrajectoryTemplate t);
std::string_view to_string(AnchorRelation r);
std::optional<TrajectoryTemplate> trajectory_template_from_string(std::string_view name);
std::optional<AnchorRelation> anchor_relation_from_string(std::string_view name);

struct Anchor {
    std::string object;
    AnchorRelation relation = AnchorRelation::InFrontOf;
    std::optional<double> distance;  // nullopt: 1.5 * max(dx, dy)

    friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct CameraSubject {
    friend bool operator==(const CameraSubject&, const CameraSubject&) = default;
};
struct ObjectSubject {
    std::string id;
    bool yaw_hold = false;
    friend bool operator==(const ObjectSubject&, const ObjectSubject&) = default;
};
using Subject = std::variant<CameraSubject, ObjectSubject>;

struct TrajectoryCommand {
    TrajectoryTemplate kind = TrajectoryTemplate::Static;
    int frames = 1;
    double span = 2.0;    // Pan
    double arc = 0.0;     // Orbit, radians; the radius is the anchor distance
    double travel = 1.0;  // Dolly
    double rise = 1.0;    // Crane
    Anchor anchor;
    Subject subject = CameraSubject{};

    /// Empty when the command is admissible.
    std::vector<std::string> problems() const;

    friend bool operator==(const TrajectoryCommand&, const TrajectoryCommand&) = default;
};

struct AnchorFrame {
    Vec3 origin;
    Vec3 facing;  // unit vector
    Vec3 center;  // anchored object's center
    /// Horizontal "right" used by Pan; cross(facing, up) except when facing is vertical.
    Vec3 right;
    double distance = 0.0;
};

/// Local +y rotated by yaw.
Vec3 object_front(const Pose& pose);

/// Throws std::domain_error for tilted objects.
AnchorFrame anchor_frame(const Pose& world_pose, const Extent& extent, AnchorRelation relation,
                         std::optional<double> distance);

struct Keyframe {
    double t = 0.0;
    Vec3 position;
    Vec3 look_at;
    double yaw = 0.0;  // object subjects only

    friend bool operator==(const Keyframe&, const Keyframe&) = default;
};

/// Throws std::invalid_argument for inadmissible commands.
std::vector<Keyframe> build_trajectory(const TrajectoryCommand& command, const AnchorFrame& frame);

/// Resolves the anchor against world poses and builds the keyframes; object
/// subjects get their headings via apply_to_object.
std::vector<Keyframe> plan_trajectory(const TrajectoryCommand& command, const SceneTree& tree);

/// Sets each keyframe's yaw to the heading of travel towards the next
/// keyframe (the last one keeps the previous heading). With yaw_hold or
/// fewer than two keyframes every yaw is `original_yaw`.
std::vector<Keyframe> apply_to_object(std::vector<Keyframe> keyframes, double original_yaw, bool yaw_hold = false);

enum class TrackKind { Camera, Object };

/// Writes the keyframe file; `subject_name` names the object for object
/// tracks. Throws std::invalid_argument for an empty track
/// or a non-positive fps.
void export_track(std::ostream& out, const std::vector<Keyframe>& keyframes, double fps, TrackKind kind,
                  std::string_view subject_name);

}  // namespace layoutforge
