#include "layoutforge/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "layoutforge/format.hpp"

namespace layoutforge {

std::vector<std::string> AnnealConfig::problems() const {
    std::vector<std::string> out;
    const double probs[] = {move_probs.translate, move_probs.rotate_jitter, move_probs.rotate_snap, move_probs.swap};
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) {
            out.emplace_back("move probabilities must be non-negative");
            break;
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        out.emplace_back("move probabilities must sum to 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        out.emplace_back("alpha must lie in (0, 1)");
    }
    if (t0 && !(*t0 > 0.0)) {
        out.emplace_back("T0 must be positive");
    }
    if (iters_per_temp && *iters_per_temp <= 0) {
        out.emplace_back("iters_per_temp must be positive");
    }
    if (!(t_min_ratio > 0.0 && t_min_ratio < 1.0)) {
        out.emplace_back("T_min_ratio must lie in (0, 1)");
    }
    if (max_evals <= 0) {
        out.emplace_back("max_evals must be positive");
    }
    if (restarts <= 0) {
        out.emplace_back("restarts must be positive");
    }
    if (sigma_xy && !(*sigma_xy >= 0.0)) {
        out.emplace_back("sigma_xy must be non-negative");
    }
    if (!(sigma_yaw >= 0.0)) {
        out.emplace_back("sigma_yaw must be non-negative");
    }
    if (!(penalty_w0 > 0.0)) {
        out.emplace_back("penalty_W0 must be positive");
    }
    if (snap && !snap->valid()) {
        out.emplace_back("snap grid needs a positive step and a non-empty yaw set");
    }
    return out;
}

bool metropolis_accept(double delta, double temperature, double u) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("temperature must be positive");
    }
    return delta <= 0.0 || u < std::exp(-delta / temperature);
}

namespace {

constexpr double kQuarterTurn = std::numbers::pi / 2.0;

struct MoveContext {
    const LayoutProblem& problem;
    const AnnealConfig& config;
    double sigma_xy;
    std::optional<PoseGrid> grid;

    MoveContext(const LayoutProblem& p, const AnnealConfig& c)
        : problem(p), config(c), sigma_xy(c.sigma_xy.value_or(0.05 * p.domain().diagonal())) {
        if (c.snap) {
            grid.emplace(p.domain(), *c.snap);
        }
    }

    Pose snapped(const Pose& pose) const {
        if (!grid) {
            return pose;
        }
        const Vec2 c = grid->snap(pose.xy());
        return pose.with_xy(c.x, c.y).with_yaw(grid->snap_yaw(pose.yaw()));
    }
};

std::vector<Pose> initial_poses(const MoveContext& ctx, Rng& rng) {
    const LayoutProblem& problem = ctx.problem;
    std::vector<Pose> poses = problem.base_poses();
    const Polygon& boundary = problem.domain().boundary;
    const Aabb2 box = bounding_box(boundary);
    for (std::size_t idx : problem.movable()) {
        Vec2 p = centroid(boundary);
        for (int attempt = 0; attempt < 100; ++attempt) {
            const Vec2 candidate{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
            if (contains_point(boundary, candidate)) {
                p = candidate;
                break;
            }
        }
        double yaw = kQuarterTurn * static_cast<double>(rng.below(4));
        if (ctx.grid) {
            const auto& yaws = ctx.grid->spec().yaw_set;
            yaw = yaws[rng.below(yaws.size())];
        }
        poses[idx] = ctx.snapped(Pose(p.x, p.y, poses[idx].z(), yaw));
    }
    return poses;
}

MoveKind draw_kind(const MoveProbs& probs, Rng& rng) {
    const double u = rng.uniform();
    if (u < probs.translate) return MoveKind::Translate;
    if (u < probs.translate + probs.rotate_jitter) return MoveKind::RotateJitter;
    if (u < probs.translate + probs.rotate_jitter + probs.rotate_snap) return MoveKind::RotateSnap;
    return MoveKind::Swap;
}

struct MoveResult {
    MoveKind kind;
    std::size_t count = 0;  // number of moved object indices
    std::array<std::size_t, 2> moved{};
};

/// Mutates `poses` in place; returns the object indices that changed.
MoveResult propose_in_place(const MoveContext& ctx, std::vector<Pose>& poses, Rng& rng) {
    const auto& movable = ctx.problem.movable();
    const AnnealConfig& cfg = ctx.config;
    MoveResult result{draw_kind(cfg.move_probs, rng)};
    const std::size_t n = movable.size();

    if (result.kind == MoveKind::Swap) {
        if (n < 2) {
            return result;
        }
        const std::size_t a = rng.below(n);
        std::size_t b = rng.below(n - 1);
        if (b >= a) {
            ++b;
        }
        const std::size_t ia = movable[a];
        const std::size_t ib = movable[b];
        const Pose pa = poses[ia];
        const Pose pb = poses[ib];
        if (cfg.full_6dof) {
            poses[ia] = pb;
            poses[ib] = pa;
        } else {
            // z belongs to the object (support rule), the rest is exchanged
            poses[ia] = Pose(pb.x(), pb.y(), pa.z(), pb.yaw());
            poses[ib] = Pose(pa.x(), pa.y(), pb.z(), pa.yaw());
        }
        result.count = 2;
        result.moved = {ia, ib};
        return result;
    }

    const std::size_t idx = movable[rng.below(n)];
    const Pose cur = poses[idx];
    switch (result.kind) {
    case MoveKind::Translate: {
        const double sigma = ctx.grid ? std::max(ctx.sigma_xy, ctx.grid->spec().xy_step) : ctx.sigma_xy;
        const double x = cur.x() + sigma * rng.normal();
        const double y = cur.y() + sigma * rng.normal();
        const double z = cfg.full_6dof ? cur.z() + sigma * rng.normal() : cur.z();
        poses[idx] = ctx.snapped(cur.with_position(x, y, z));
        break;
    }
    case MoveKind::RotateJitter: {
        const double yaw = cur.yaw() + cfg.sigma_yaw * rng.normal();
        if (cfg.full_6dof) {
            const double pitch = cur.pitch() + cfg.sigma_yaw * rng.normal();
            const double roll = cur.roll() + cfg.sigma_yaw * rng.normal();
            poses[idx] = ctx.snapped(cur.with_angles(yaw, pitch, roll));
        } else {
            poses[idx] = ctx.snapped(cur.with_yaw(yaw));
        }
        break;
    }
    case MoveKind::RotateSnap: {
        double yaw = kQuarterTurn * static_cast<double>(rng.below(4));
        if (ctx.grid) {
            const auto& yaws = ctx.grid->spec().yaw_set;
            yaw = yaws[rng.below(yaws.size())];
        }
        poses[idx] = cur.with_yaw(yaw);
        break;
    }
    case MoveKind::Swap:
        break;
    }
    result.count = 1;
    result.moved = {idx, idx};
    return result;
}

bool better(bool feasible, double aug, bool best_feasible, double best_aug) {
    if (feasible != best_feasible) {
        return feasible;
    }
    return aug < best_aug;
}

struct RestartResult {
    std::vector<Pose> poses;
    Breakdown breakdown;
    bool feasible = false;
    long evals = 0;
    std::vector<TraceRecord> trace;
};

/// Evaluates every term; nullopt when a footprint relation rejects a tilted pose.
std::optional<std::vector<double>> all_values(const LayoutProblem& problem, std::span<const Pose> poses) {
    std::vector<double> values(problem.terms().size());
    try {
        for (std::size_t t = 0; t < values.size(); ++t) {
            values[t] = problem.term_value(t, poses);
        }
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
    return values;
}

double augmented(const Breakdown& b, double weight) { return b.objective + weight * b.total_violation; }

RestartResult run_restart(const MoveContext& ctx, Rng& rng, double weight, int restart_index) {
    const LayoutProblem& problem = ctx.problem;
    const AnnealConfig& cfg = ctx.config;
    RestartResult out;

    std::vector<Pose> poses = initial_poses(ctx, rng);
    std::vector<double> values = all_values(problem, poses).value();
    Breakdown current = collect(problem, values);
    double current_aug = augmented(current, weight);
    long evals = 1;

    out.poses = poses;
    out.breakdown = current;
    out.feasible = is_feasible(current);
    double best_aug = current_aug;
    double lowest_aug = current_aug;

    double t0 = 0.0;
    if (cfg.t0) {
        t0 = *cfg.t0;
    } else {
        std::vector<double> samples;
        samples.reserve(100);
        for (int i = 0; i < 100; ++i) {
            std::vector<Pose> trial = poses;
            propose_in_place(ctx, trial, rng);
            ++evals;
            if (auto v = all_values(problem, trial)) {
                samples.push_back(augmented(collect(problem, *v), weight));
            }
        }
        double mean = 0.0;
        for (double s : samples) mean += s;
        mean /= static_cast<double>(std::max<std::size_t>(1, samples.size()));
        double var = 0.0;
        for (double s : samples) var += (s - mean) * (s - mean);
        var /= static_cast<double>(std::max<std::size_t>(1, samples.size()));
        t0 = std::max(1e-6, std::sqrt(var));
    }

    const long per_temp = cfg.iters_per_temp.value_or(100 * static_cast<long>(problem.movable_count()));
    double temperature = t0;
    long proposals = 0;
    std::vector<double> trial_values = values;

    while (evals < cfg.max_evals && temperature >= cfg.t_min_ratio * t0) {
        std::vector<Pose> trial = poses;
        const MoveResult move = propose_in_place(ctx, trial, rng);
        ++evals;
        ++proposals;
        const double u = rng.uniform();

        bool ok = true;
        trial_values = values;
        if (move.count > 0) {
            try {
                for (std::size_t k = 0; k < move.count; ++k) {
                    if (k == 1 && move.moved[1] == move.moved[0]) break;
                    for (std::size_t t : problem.terms_of()[move.moved[k]]) {
                        trial_values[t] = problem.term_value(t, trial);
                    }
                }
            } catch (const std::domain_error&) {
                ok = false;
            }
        }
        if (ok) {
            const Breakdown candidate = collect(problem, trial_values);
            const double cand_aug = augmented(candidate, weight);
            if (metropolis_accept(cand_aug - current_aug, temperature, u)) {
                poses = std::move(trial);
                values = trial_values;
                current = candidate;
                current_aug = cand_aug;
                const bool feasible = is_feasible(current);
                if (better(feasible, current_aug, out.feasible, best_aug)) {
                    out.poses = poses;
                    out.breakdown = current;
                    out.feasible = feasible;
                    best_aug = current_aug;
                }
                lowest_aug = std::min(lowest_aug, current_aug);
                if (cfg.record_trace) {
                    out.trace.push_back({restart_index, evals, temperature, current_aug, lowest_aug});
                }
            }
        }
        if (proposals % per_temp == 0) {
            temperature *= cfg.alpha;
        }
    }
    out.evals = evals;
    return out;
}

/// Cross-restart order: feasible first, then objective (feasible) or total
/// violation (infeasible); earlier restarts win ties.
bool better_solution(const Solution& a, const Solution& b) {
    if (a.feasible != b.feasible) {
        return a.feasible;
    }
    if (a.feasible) {
        return a.breakdown.objective < b.breakdown.objective;
    }
    if (a.breakdown.total_violation != b.breakdown.total_violation) {
        return a.breakdown.total_violation < b.breakdown.total_violation;
    }
    return a.breakdown.objective < b.breakdown.objective;
}

}  // namespace

Layout init_layout(const LayoutProblem& problem, Rng& rng, const AnnealConfig& config) {
    const MoveContext ctx(problem, config);
    const std::vector<Pose> poses = initial_poses(ctx, rng);
    return problem.layout_of(poses);
}

Proposal propose_move(const Layout& layout, const LayoutProblem& problem, Rng& rng, const AnnealConfig& config) {
    const MoveContext ctx(problem, config);
    std::vector<Pose> poses = problem.poses_of(layout);
    const MoveResult move = propose_in_place(ctx, poses, rng);
    Proposal out{problem.layout_of(poses), {}, move.kind};
    for (std::size_t k = 0; k < move.count; ++k) {
        out.moved.push_back(problem.objects()[move.moved[k]].id);
    }
    return out;
}

Solution anneal(const LayoutProblem& problem, const AnnealConfig& config) {
    const auto issues = config.problems();
    if (!issues.empty()) {
        throw std::invalid_argument("invalid anneal config: " + issues.front());
    }
    const MoveContext ctx(problem, config);
    double weight = config.penalty_w0 * std::max(1.0, problem.weight_sum());

    std::optional<Solution> best;
    long total_evals = 0;
    std::vector<TraceRecord> trace;
    for (int r = 0; r < config.restarts; ++r) {
        Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(r), "anneal");
        RestartResult res = run_restart(ctx, rng, weight, r);
        total_evals += res.evals;
        trace.insert(trace.end(), res.trace.begin(), res.trace.end());

        Solution candidate;
        candidate.layout = problem.layout_of(res.poses);
        candidate.breakdown = std::move(res.breakdown);
        candidate.feasible = res.feasible;
        candidate.restart_index = r;
        candidate.penalty_weight = weight;
        if (!best || better_solution(candidate, *best)) {
            best = std::move(candidate);
        }
        if (!res.feasible) {
            weight *= 10.0;
        }
    }
    best->evals_used = total_evals;
    best->trace = std::move(trace);
    return *best;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
    for (const TraceRecord& r : trace) {
        out << r.restart << ' ' << r.eval << ' ' << format_double(r.temperature) << ' ' << format_double(r.augmented)
            << ' ' << format_double(r.best_augmented) << '\n';
    }
}

LevelTerms group_terms_by_level(const SceneTree& tree, const std::vector<RelationTerm>& terms) {
    LevelTerms out;
    for (const RelationTerm& t : terms) {
        std::string key;
        if (!t.participants.empty()) {
            key = tree.parent_of(t.participants.front()).value_or("");
        }
        out[key].push_back(t);
    }
    return out;
}

bool HierarchySolution::feasible() const {
    return std::all_of(levels.begin(), levels.end(), [](const LevelReport& l) { return l.feasible; });
}

HierarchySolution solve_hierarchical(const SceneTree& tree, const LevelTerms& terms, const LevelSolver& solver,
                                     const AutoRules& rules) {
    HierarchySolution out;
    out.tree = tree;
    static const std::vector<RelationTerm> kNone;
    std::size_t level_index = 0;

    const auto terms_for = [&](const std::string& key) -> const std::vector<RelationTerm>& {
        const auto it = terms.find(key);
        return it == terms.end() ? kNone : it->second;
    };

    std::function<void(const std::optional<std::string>&, std::vector<ObjectNode>&)> solve_level =
        [&](const std::optional<std::string>& parent, std::vector<ObjectNode>& children) {
            const bool any_movable =
                std::any_of(children.begin(), children.end(), [](const ObjectNode& n) { return !n.fixed; });
            if (any_movable) {
                const LayoutProblem problem = assemble(out.tree, parent, terms_for(parent.value_or("")), rules);
                Solution solution = solver(problem, level_index);
                for (ObjectNode& child : children) {
                    if (child.fixed) {
                        continue;
                    }
                    const Pose& p = solution.layout.at(child.id);
                    child.local_pose = p.with_z(p.z() + problem.frame_z_offset());
                }
                LevelReport report{parent, level_index, std::move(solution), false, {}, {}};
                report.feasible = report.solution.feasible;
                for (const ProblemTerm& t : problem.terms()) {
                    (t.term.soft() ? report.soft_labels : report.hard_labels).push_back(t.term.label());
                }
                out.levels.push_back(std::move(report));
                ++level_index;
            }
            for (ObjectNode& child : children) {
                if (!child.children.empty()) {
                    solve_level(child.id, child.children);
                }
            }
        };
    solve_level(std::nullopt, out.tree.roots);
    return out;
}

HierarchySolution solve_hierarchical(const SceneTree& tree, const LevelTerms& terms, const AnnealConfig& config,
                                     const AutoRules& rules) {
    return solve_hierarchical(
        tree, terms,
        [&](const LayoutProblem& problem, std::size_t level_index) {
            AnnealConfig level = config;
            if (level_index > 0) {
                level.seed = derive_seed(config.seed, level_index, "level");
            }
            return anneal(problem, level);
        },
        rules);
}

}  // namespace layoutforge
