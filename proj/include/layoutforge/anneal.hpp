#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "layoutforge/grid.hpp"
#include "layoutforge/problem.hpp"
#include "layoutforge/random.hpp"

namespace layoutforge {

enum class MoveKind { Translate, RotateJitter, RotateSnap, Swap };

struct MoveProbs {
    double translate = 0.5;
    double rotate_jitter = 0.2;
    double rotate_snap = 0.1;
    double swap = 0.2;

    friend bool operator==(const MoveProbs&, const MoveProbs&) = default;
};

struct AnnealConfig {
    std::uint64_t seed = 0;
    std::optional<double> t0;              // nullopt: estimated from the start layout
    double alpha = 0.95;
    std::optional<long> iters_per_temp;    // nullopt: 100 * movable count
    double t_min_ratio = 1e-4;
    long max_evals = 200000;               // per restart
    MoveProbs move_probs;
    std::optional<double> sigma_xy;        // nullopt: 5% of the domain diameter
    double sigma_yaw = 0.25;
    double penalty_w0 = 1e3;
    int restarts = 3;
    /// Optimize z, pitch and roll as well. Footprint-based relations reject
    /// tilted candidates, which the solver treats as rejected moves.
    bool full_6dof = false;
    /// Restrict every pose to this grid (snap-only moves).
    std::optional<GridSpec> snap;
    bool record_trace = false;

    /// Empty when the configuration is admissible.
    std::vector<std::string> problems() const;

    friend bool operator==(const AnnealConfig&, const AnnealConfig&) = default;
};

/// One record per accepted move.
struct TraceRecord {
    int restart = 0;
    long eval = 0;
    double temperature = 0.0;
    double augmented = 0.0;
    /// Lowest augmented objective seen so far within the restart.
    double best_augmented = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct Solution {
    Layout layout;
    Breakdown breakdown;
    bool feasible = false;
    long evals_used = 0;
    int restart_index = 0;
    /// Penalty weight in force for the restart that produced the layout.
    double penalty_weight = 0.0;
    std::vector<TraceRecord> trace;

    friend bool operator==(const Solution&, const Solution&) = default;
};

Layout init_layout(const LayoutProblem& problem, Rng& rng, const AnnealConfig& config = {});

struct Proposal {
    Layout layout;
    std::vector<std::string> moved;
    MoveKind kind = MoveKind::Translate;
};

Proposal propose_move(const Layout& layout, const LayoutProblem& problem, Rng& rng, const AnnealConfig& config);

/// Metropolis-Hastings acceptance: always accept improvements, accept a
/// worsening delta with probability exp(-delta / T). Throws for T <= 0.
bool metropolis_accept(double delta, double temperature, double u);

Solution anneal(const LayoutProblem& problem, const AnnealConfig& config);

/// Writes the trace as whitespace-separated lines
/// `restart eval temperature augmented best_augmented`.
void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);

// ---------------------------------------------------------------------------
// Hierarchical driver

/// Terms per level, keyed by parent id; the root level uses the empty key.
using LevelTerms = std::map<std::string, std::vector<RelationTerm>>;

/// Groups terms by the parent of their first participant. Terms whose
/// participants straddle levels are kept on that level and rejected later by
/// assemble().
LevelTerms group_terms_by_level(const SceneTree& tree, const std::vector<RelationTerm>& terms);

struct LevelReport {
    std::optional<std::string> parent;
    std::size_t level_index = 0;
    Solution solution;
    bool feasible = false;
    std::vector<std::string> soft_labels;  // aligned with solution.breakdown.soft_scores
    std::vector<std::string> hard_labels;  // aligned with solution.breakdown.violations
};

struct HierarchySolution {
    SceneTree tree;  // local poses filled in
    std::vector<LevelReport> levels;

    bool feasible() const;
};

using LevelSolver = std::function<Solution(const LayoutProblem& problem, std::size_t level_index)>;

/// Depth-first, top-down: solve the root level, write the local poses back,
/// then each parent's children in the parent's frame.
HierarchySolution solve_hierarchical(const SceneTree& tree, const LevelTerms& terms, const LevelSolver& solver,
                                     const AutoRules& rules = {});

/// Annealing at every level; level 0 uses config.seed unchanged, deeper
/// levels derive their seed from (seed, level index).
HierarchySolution solve_hierarchical(const SceneTree& tree, const LevelTerms& terms, const AnnealConfig& config,
                                     const AutoRules& rules = {});

}  // namespace layoutforge
