#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "layoutforge/relations.hpp"
#include "layoutforge/scene.hpp"

namespace layoutforge {

struct ProblemObject {
    std::string id;
    std::string category;
    Extent extent;
    bool fixed = false;
    /// Pose in the level frame. For fixed objects this is the pose used
    /// throughout; for movable ones it only carries the support height.
    Pose pose;
};

struct ProblemTerm {
    RelationTerm term;
    std::vector<std::size_t> indices;  // participant object indices
    bool automatic = false;
};

struct AutoRules {
    bool collision = true;
    bool containment = true;
    /// Sibling pairs allowed to interpenetrate (stacking).
    std::vector<std::pair<std::string, std::string>> collision_exempt;
    std::vector<std::string> containment_exempt;
    /// Height of the domain handed to child levels above the parent's top face.
    double child_clearance = 1.0;

    friend bool operator==(const AutoRules&, const AutoRules&) = default;
};

/// One level of the object tree as an optimization problem: minimize the
/// weighted soft terms subject to the hard terms. Immutable once built.
///
/// Poses are expressed in the level frame, whose origin is the parent's
/// center lifted to its top face (the domain frame for the root level), so
/// every support surface sits at z = 0.
class LayoutProblem {
public:
    LayoutProblem(Domain domain, std::vector<ProblemObject> objects, std::vector<ProblemTerm> terms,
                  std::optional<std::string> parent = std::nullopt, double frame_z_offset = 0.0);

    const Domain& domain() const { return domain_; }
    const std::vector<ProblemObject>& objects() const { return objects_; }
    const std::vector<ProblemTerm>& terms() const { return terms_; }
    const std::vector<std::size_t>& movable() const { return movable_; }
    /// Terms touching each object, by object index.
    const std::vector<std::vector<std::size_t>>& terms_of() const { return terms_of_; }
    const std::optional<std::string>& parent() const { return parent_; }
    /// Add to a level-frame z to get the parent-local z.
    double frame_z_offset() const { return frame_z_offset_; }

    std::size_t movable_count() const { return movable_.size(); }
    std::size_t soft_count() const { return soft_count_; }
    std::size_t hard_count() const { return terms_.size() - soft_count_; }
    double weight_sum() const;

    std::optional<std::size_t> index_of(std::string_view id) const;

    /// Poses of all objects in object order, fixed ones at their fixed pose.
    std::vector<Pose> base_poses() const { return base_; }
    std::vector<Pose> poses_of(const Layout& layout) const;
    Layout layout_of(std::span<const Pose> poses) const;

    /// Shaped value (soft score or hard violation) of one term.
    double term_value(std::size_t term_index, std::span<const Pose> poses) const;

private:
    Domain domain_;
    std::vector<ProblemObject> objects_;
    std::vector<ProblemTerm> terms_;
    std::optional<std::string> parent_;
    double frame_z_offset_ = 0.0;
    std::vector<std::size_t> movable_;
    std::vector<std::vector<std::size_t>> terms_of_;
    std::vector<Pose> base_;
    std::size_t soft_count_ = 0;
};

struct Breakdown {
    double objective = 0.0;
    std::vector<double> soft_scores;  // soft terms, in term order
    std::vector<double> violations;   // hard terms, in term order
    double total_violation = 0.0;

    friend bool operator==(const Breakdown&, const Breakdown&) = default;
};

inline constexpr double kFeasibilityTolerance = 1e-6;

/// Builds the subproblem over the children of `parent` (root level when
/// nullopt) from a validated tree. Throws std::invalid_argument("cross-level
/// term ...") when a term names an object outside that level.
LayoutProblem assemble(const SceneTree& tree, const std::optional<std::string>& parent,
                       std::span<const RelationTerm> user_terms, const AutoRules& rules = {});

Breakdown evaluate(const LayoutProblem& problem, const Layout& layout);
Breakdown evaluate(const LayoutProblem& problem, std::span<const Pose> poses);

/// Sums per-term values (as produced by term_value) into a Breakdown.
Breakdown collect(const LayoutProblem& problem, std::span<const double> term_values);

bool is_feasible(const Breakdown& breakdown, double tol = kFeasibilityTolerance);

}  // namespace layoutforge
