#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "layoutforge/anneal.hpp"
#include "layoutforge/forge.hpp"
#include "layoutforge/problem.hpp"
#include "layoutforge/scene.hpp"
#include "layoutforge/trajectory.hpp"

namespace layoutforge {

inline constexpr int kSpecVersion = 1;
inline constexpr int kLayoutVersion = 1;

/// Parse or validation failure. `where` is a JSON pointer ("/terms/2/kind")
/// for field errors, or "line L, column C" for syntax errors.
class SpecError : public std::runtime_error {
public:
    SpecError(std::string where, const std::string& message)
        : std::runtime_error(where.empty() ? message : where + ": " + message), where_(std::move(where)) {}

    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct SpecObject {
    std::string id;
    std::string category;
    Extent dims;
    std::optional<std::string> parent;
    /// x, y and angles in the parent frame; z always follows the support rule.
    std::optional<Pose> fixed_pose;

    friend bool operator==(const SpecObject&, const SpecObject&) = default;
};

/// Normalized scene spec: every default filled in.
struct SceneSpec {
    int version = kSpecVersion;
    Domain domain;
    std::vector<SpecObject> objects;
    std::vector<RelationTerm> terms;
    AnnealConfig solver;
    AutoRules auto_rules;
    std::vector<TrajectoryCommand> trajectories;

    friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

/// Throws SpecError for syntax errors, unknown or mistyped fields, unknown
/// relation kinds, dangling ids, parent cycles and inadmissible values.
SceneSpec parse_spec(std::string_view text);
std::string serialize_spec(const SceneSpec& spec);

/// Object tree in declaration order, validated, with support-rule heights.
SceneTree build_tree(const SceneSpec& spec);

// ---------------------------------------------------------------------------
// Layout files

struct LayoutObject {
    std::string id;
    std::optional<std::string> parent;
    std::string category;
    Extent dims;
    bool fixed = false;
    Pose local_pose;
    Pose world_pose;
    bool feasible = true;  // feasibility of the level the object was placed on
};

struct LayoutLevel {
    std::optional<std::string> parent;
    bool feasible = false;
    double objective = 0.0;
    double total_violation = 0.0;
    std::vector<std::pair<std::string, double>> soft_scores;
    std::vector<std::pair<std::string, double>> violations;
    long evals_used = 0;
    int restart_index = 0;
};

struct LayoutFile {
    Domain domain;
    bool feasible = false;
    std::vector<LayoutObject> objects;  // tree DFS order
    std::vector<LayoutLevel> levels;

    /// Rebuilds the object tree from the local poses.
    SceneTree tree() const;
};

LayoutFile make_layout_file(const HierarchySolution& solution);
std::string layout_to_json(const LayoutFile& layout);
LayoutFile parse_layout(std::string_view text);

// ---------------------------------------------------------------------------
// SVG

inline constexpr double kSvgPixelsPerMeter = 50.0;
inline constexpr double kSvgMargin = 20.0;

/// Page transform: X = margin + 50 (x - min x), Y = margin + 50 (max y - y),
/// where the bounds are those of the domain boundary.
Vec2 svg_page_point(const Domain& domain, Vec2 world);

/// Top-down drawing: domain outline, then per object in DFS order a group
/// with its footprint polygon, id label and a front tick.
std::string render_svg(const SceneTree& tree);

// ---------------------------------------------------------------------------
// Forge task files

struct TaskFile {
    Task task;
    Generator generator;
};

/// {"version":1, "text":..., "spec":[predicates], "generator":{...}} where
/// the generator is {"kind":"suggest","start":program} or
/// {"kind":"enumerate","base":program,"parameter":name,"values":[...]}.
TaskFile parse_task(std::string_view text);

// ---------------------------------------------------------------------------

std::string read_file(const std::string& path);
/// Throws std::runtime_error("cannot write <path>").
void write_file(const std::string& path, std::string_view contents);

}  // namespace layoutforge
