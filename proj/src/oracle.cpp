#include "layoutforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace layoutforge {

std::vector<std::vector<Pose>> oracle_candidates(const LayoutProblem& problem, const PoseGrid& grid) {
    const std::vector<Vec2> centers = grid.interior_centers();
    std::vector<double> yaws;
    for (double y : grid.spec().yaw_set) yaws.push_back(wrap_angle(y));
    std::sort(yaws.begin(), yaws.end());
    yaws.erase(std::unique(yaws.begin(), yaws.end()), yaws.end());
    std::vector<std::vector<Pose>> out(problem.objects().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const ProblemObject& obj = problem.objects()[i];
        if (obj.fixed) {
            out[i].push_back(obj.pose);
            continue;
        }
        for (const Vec2& c : centers) {
            for (double yaw : yaws) {
                const Pose pose(c.x, c.y, obj.pose.z(), yaw);
                bool inside = true;
                for (const Vec2& corner : world_footprint(pose, obj.extent)) {
                    inside = inside && contains_point(problem.domain().boundary, corner, 1e-9);
                }
                if (inside) {
                    out[i].push_back(pose);
                }
            }
        }
    }
    return out;
}

namespace {

constexpr double kTie = 1e-12;

/// Depth-first enumeration with object 0 outermost. Soft scores and
/// violations are non-negative, so partial sums bound every completion and
/// let whole subtrees be skipped once a better assignment is known.
class Search {
public:
    Search(const LayoutProblem& problem, std::vector<std::vector<Pose>> candidates)
        : problem_(problem), candidates_(std::move(candidates)), order_(problem.movable()) {
        std::vector<std::size_t> depth_of(problem.objects().size(), kFixed);
        for (std::size_t d = 0; d < order_.size(); ++d) {
            depth_of[order_[d]] = d;
        }
        poses_ = problem.base_poses();
        due_.assign(order_.size(), {});
        unary_.assign(order_.size(), {});
        std::vector<std::vector<bool>> single(order_.size());
        for (std::size_t t = 0; t < problem.terms().size(); ++t) {
            std::size_t deepest = kFixed;
            std::size_t movable = 0;
            for (std::size_t idx : problem.terms()[t].indices) {
                if (depth_of[idx] != kFixed) {
                    ++movable;
                    deepest = deepest == kFixed ? depth_of[idx] : std::max(deepest, depth_of[idx]);
                }
            }
            const bool soft = problem.terms()[t].term.soft();
            if (deepest == kFixed) {
                // only fixed participants: constant over the enumeration
                (soft ? base_objective_ : base_violation_) += problem.term_value(t, poses_);
                continue;
            }
            due_[deepest].push_back({t, soft, movable == 1});
        }
        // hard terms first: a violation prunes before the soft terms are computed
        for (auto& level : due_) {
            std::stable_partition(level.begin(), level.end(), [](const Due& d) { return !d.soft; });
        }
        // single-object terms depend on one candidate only; tabulate them
        for (std::size_t d = 0; d < order_.size(); ++d) {
            std::vector<Pose> poses = problem.base_poses();
            const std::size_t obj = order_[d];
            for (const Pose& cand : candidates_[obj]) {
                poses[obj] = cand;
                for (const Due& due : due_[d]) {
                    if (due.unary) {
                        unary_[d].push_back(problem.term_value(due.term, poses));
                    }
                }
            }
        }
    }

    std::vector<Pose> run() {
        descend(0, base_objective_, base_violation_);
        return best_poses_;
    }

private:
    static constexpr std::size_t kFixed = SIZE_MAX;

    struct Due {
        std::size_t term;
        bool soft;
        bool unary;
    };

    bool hopeless(double objective, double violation) const {
        if (!have_best_) {
            return false;
        }
        if (best_feasible_) {
            return violation > kFeasibilityTolerance || objective >= best_objective_ - kTie;
        }
        return violation > best_violation_ + kTie;
    }

    void consider(double objective, double violation) {
        const bool feasible = violation <= kFeasibilityTolerance;
        bool take = !have_best_;
        if (have_best_) {
            if (feasible != best_feasible_) {
                take = feasible;
            } else if (feasible) {
                take = objective < best_objective_ - kTie;
            } else if (violation < best_violation_ - kTie) {
                take = true;
            } else if (violation <= best_violation_ + kTie) {
                take = objective < best_objective_ - kTie;
            }
        }
        if (take) {
            have_best_ = true;
            best_feasible_ = feasible;
            best_violation_ = violation;
            best_objective_ = objective;
            best_poses_ = poses_;
        }
    }

    void descend(std::size_t depth, double objective, double violation) {
        if (depth == order_.size()) {
            consider(objective, violation);
            return;
        }
        const std::size_t obj = order_[depth];
        const std::vector<Due>& due = due_[depth];
        std::size_t unary_per_candidate = 0;
        for (const Due& d : due) unary_per_candidate += d.unary;

        for (std::size_t c = 0; c < candidates_[obj].size(); ++c) {
            poses_[obj] = candidates_[obj][c];
            double o = objective;
            double v = violation;
            const double* unary = unary_[depth].data() + c * unary_per_candidate;
            bool pruned = false;
            for (const Due& d : due) {
                const double value = d.unary ? *unary++ : problem_.term_value(d.term, poses_);
                (d.soft ? o : v) += value;
                if (hopeless(o, v)) {
                    pruned = true;
                    break;
                }
            }
            if (!pruned) {
                descend(depth + 1, o, v);
            }
        }
    }

    const LayoutProblem& problem_;
    std::vector<std::vector<Pose>> candidates_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<Due>> due_;
    std::vector<std::vector<double>> unary_;  // [depth][candidate * unary terms + k]
    double base_objective_ = 0.0;
    double base_violation_ = 0.0;
    std::vector<Pose> poses_;

    bool have_best_ = false;
    bool best_feasible_ = false;
    double best_violation_ = 0.0;
    double best_objective_ = 0.0;
    std::vector<Pose> best_poses_;
};

}  // namespace

Solution oracle_solve(const LayoutProblem& problem, const GridSpec& spec) {
    const PoseGrid grid(problem.domain(), spec);
    if (problem.movable_count() > spec.max_objects) {
        throw std::invalid_argument("instance too large for oracle");
    }
    std::vector<std::vector<Pose>> candidates = oracle_candidates(problem, grid);
    double combos = 1.0;
    for (std::size_t i : problem.movable()) {
        combos *= static_cast<double>(candidates[i].size());
    }
    if (combos > static_cast<double>(kOracleMaxCombinations)) {
        throw std::invalid_argument("instance too large for oracle");
    }
    if (combos == 0.0) {
        throw std::invalid_argument("no grid pose fits inside the domain");
    }

    const std::vector<Pose> best = Search(problem, std::move(candidates)).run();
    Solution out;
    out.layout = problem.layout_of(best);
    out.breakdown = evaluate(problem, best);
    out.feasible = is_feasible(out.breakdown);
    out.evals_used = static_cast<long>(combos);
    return out;
}

AreaEstimate mc_polygon_area(const Polygon& a, const Polygon& b, std::size_t samples, std::uint64_t seed) {
    if (samples == 0) {
        throw std::invalid_argument("need at least one sample");
    }
    const Aabb2 box = bounding_box(a);
    const double box_area = (box.hi.x - box.lo.x) * (box.hi.y - box.lo.y);
    Rng rng = Rng::stream(seed, 0, "mc-area");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const Vec2 p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
        hits += contains_point(a, p) && contains_point(b, p);
    }
    const double n = static_cast<double>(samples);
    const double frac = static_cast<double>(hits) / n;
    // keep the error estimate away from zero when every sample agrees
    const double p = std::clamp(frac, 0.5 / n, 1.0 - 0.5 / n);
    return {box_area * frac, box_area * std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace layoutforge
