#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "layoutforge/scene.hpp"

namespace layoutforge {

/// Distance, RelativeOrientation, Alignment, Proximity, Overlap and Symmetry
/// are user-facing relations. Containment and Collision are plumbing used by
/// the automatic rules (and still available to users).
enum class RelationKind { Distance, RelativeOrientation, Alignment, Proximity, Overlap, Symmetry, Containment, Collision };

enum class Axis { X, Y, Z };
enum class Comparator { LessEq, GreaterEq, WithinTol };

std::string_view to_string(RelationKind kind);
std::string_view to_string(Axis axis);
std::string_view to_string(Comparator cmp);
std::optional<RelationKind> relation_kind_from_string(std::string_view name);
std::optional<Axis> axis_from_string(std::string_view name);
std::optional<Comparator> comparator_from_string(std::string_view name);

bool is_plumbing(RelationKind kind);

inline constexpr double kDefaultProximityEpsilon = 0.01;

struct Reflection {
    Vec2 point;
    Vec2 normal{1.0, 0.0};  // horizontal, unit length
    friend bool operator==(const Reflection&, const Reflection&) = default;
};

struct Rotational {
    Vec2 center;
    int order = 2;
    friend bool operator==(const Rotational&, const Rotational&) = default;
};

using SymmetrySpec = std::variant<Reflection, Rotational>;

/// Index pairs into the participant list; empty means auto-pairing.
using Pairing = std::vector<std::pair<std::size_t, std::size_t>>;

struct TermParams {
    double target = 0.0;  // Distance, RelativeOrientation, Overlap
    Axis axis = Axis::X;  // Alignment, Overlap
    SymmetrySpec symmetry = Reflection{};
    Pairing pairs;

    friend bool operator==(const TermParams&, const TermParams&) = default;
};

struct Soft {
    double weight = 1.0;
    friend bool operator==(const Soft&, const Soft&) = default;
};

struct Hard {
    Comparator comparator = Comparator::LessEq;
    double threshold = 0.0;
    double tolerance = 0.0;
    friend bool operator==(const Hard&, const Hard&) = default;
};

using TermMode = std::variant<Soft, Hard>;

struct RelationTerm {
    RelationKind kind = RelationKind::Distance;
    std::vector<std::string> participants;
    TermParams params;
    TermMode mode = Soft{};

    bool soft() const { return std::holds_alternative<Soft>(mode); }
    /// Empty when participant count, weights and tolerances are admissible.
    std::vector<std::string> problems() const;
    std::string label() const;

    friend bool operator==(const RelationTerm&, const RelationTerm&) = default;
};

/// Hard proximity with the default epsilon, the usual "adjacent" constraint.
RelationTerm proximity_constraint(std::string a, std::string b, double epsilon = kDefaultProximityEpsilon);

double measure_distance(const PlacedBox& a, const PlacedBox& b);
double measure_rel_orientation(const PlacedBox& a, const PlacedBox& b, double target);
double measure_alignment(std::span<const PlacedBox> objects, Axis axis);
double measure_proximity(const PlacedBox& a, const PlacedBox& b);
double measure_overlap(const PlacedBox& a, const PlacedBox& b, Axis axis);

/// Half-width of the box's corner projection onto a world axis.
double projection_half_width(const PlacedBox& box, Axis axis);

/// `categories` drives auto-pairing and may be empty when `pairs` is
/// explicit. Auto-pairing fails with std::invalid_argument("unpairable set")
/// when a participant has no same-category partner within `max_match`.
double measure_symmetry(std::span<const PlacedBox> objects, std::span<const std::string> categories,
                        const SymmetrySpec& spec, const Pairing& pairs, double max_match);

/// The pairing auto-pairing would choose for the given configuration.
Pairing auto_pairing(std::span<const PlacedBox> objects, std::span<const std::string> categories,
                     const SymmetrySpec& spec, double max_match);

double measure_containment(const PlacedBox& a, const Domain& domain);
double measure_collision(const PlacedBox& a, const PlacedBox& b);

/// Raw measure of a term over already-resolved participant boxes.
double measure_term(const RelationTerm& term, std::span<const PlacedBox> boxes, std::span<const std::string> categories,
                    const Domain& domain);

/// Soft score or hard violation for a given raw measure.
double shape_measure(const RelationTerm& term, double measure);

struct SoftScore {
    double score;
};
struct HardViolation {
    double violation;
};
using TermOutcome = std::variant<SoftScore, HardViolation>;

struct ObjectInfo {
    std::string id;
    std::string category;
    Extent extent;
};

/// Participants are looked up by id in `layout` (pose) and `objects` (static
/// data). Throws std::out_of_range("unknown object: <id>").
TermOutcome evaluate_term(const RelationTerm& term, const Layout& layout, std::span<const ObjectInfo> objects,
                          const Domain& domain);

}  // namespace layoutforge
