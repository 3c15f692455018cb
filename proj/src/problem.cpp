#include "layoutforge/problem.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace layoutforge {

LayoutProblem::LayoutProblem(Domain domain, std::vector<ProblemObject> objects, std::vector<ProblemTerm> terms,
                             std::optional<std::string> parent, double frame_z_offset)
    : domain_(std::move(domain)),
      objects_(std::move(objects)),
      terms_(std::move(terms)),
      parent_(std::move(parent)),
      frame_z_offset_(frame_z_offset) {
    const auto problems = domain_.problems();
    if (!problems.empty()) {
        throw std::invalid_argument(problems.front());
    }
    terms_of_.resize(objects_.size());
    base_.reserve(objects_.size());
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        if (!objects_[i].fixed) {
            movable_.push_back(i);
        }
        base_.push_back(objects_[i].pose);
    }
    if (movable_.empty()) {
        throw std::invalid_argument("layout problem needs at least one movable object");
    }
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        ProblemTerm& pt = terms_[t];
        pt.indices.clear();
        for (const std::string& id : pt.term.participants) {
            const auto idx = index_of(id);
            if (!idx) {
                throw std::invalid_argument("unknown object: " + id);
            }
            pt.indices.push_back(*idx);
            terms_of_[*idx].push_back(t);
        }
        if (pt.term.soft()) {
            ++soft_count_;
        }
    }
}

double LayoutProblem::weight_sum() const {
    double sum = 0.0;
    for (const ProblemTerm& t : terms_) {
        if (const auto* s = std::get_if<Soft>(&t.term.mode)) {
            sum += s->weight;
        }
    }
    return sum;
}

std::optional<std::size_t> LayoutProblem::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        if (objects_[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<Pose> LayoutProblem::poses_of(const Layout& layout) const {
    std::vector<Pose> out;
    out.reserve(objects_.size());
    for (const ProblemObject& o : objects_) {
        out.push_back(layout.at(o.id));
    }
    return out;
}

Layout LayoutProblem::layout_of(std::span<const Pose> poses) const {
    std::vector<std::string> ids;
    ids.reserve(objects_.size());
    for (const ProblemObject& o : objects_) {
        ids.push_back(o.id);
    }
    return {std::move(ids), std::vector<Pose>(poses.begin(), poses.end())};
}

double LayoutProblem::term_value(std::size_t term_index, std::span<const Pose> poses) const {
    const ProblemTerm& pt = terms_[term_index];
    if (pt.indices.size() <= 2) {
        std::array<PlacedBox, 2> boxes;
        std::array<std::string, 2> categories;
        const bool needs_categories = pt.term.kind == RelationKind::Symmetry;
        for (std::size_t k = 0; k < pt.indices.size(); ++k) {
            boxes[k] = {poses[pt.indices[k]], objects_[pt.indices[k]].extent};
            if (needs_categories) {
                categories[k] = objects_[pt.indices[k]].category;
            }
        }
        const std::size_t n = pt.indices.size();
        return shape_measure(pt.term, measure_term(pt.term, std::span<const PlacedBox>(boxes.data(), n),
                                                   std::span<const std::string>(categories.data(), n), domain_));
    }
    std::vector<PlacedBox> boxes;
    std::vector<std::string> categories;
    boxes.reserve(pt.indices.size());
    categories.reserve(pt.indices.size());
    for (std::size_t idx : pt.indices) {
        boxes.push_back({poses[idx], objects_[idx].extent});
        categories.push_back(objects_[idx].category);
    }
    return shape_measure(pt.term, measure_term(pt.term, boxes, categories, domain_));
}

namespace {

std::vector<const ObjectNode*> level_nodes(const SceneTree& tree, const std::optional<std::string>& parent,
                                           const ObjectNode** parent_node) {
    std::vector<const ObjectNode*> out;
    const std::vector<ObjectNode>* children = &tree.roots;
    *parent_node = nullptr;
    if (parent) {
        const ObjectNode* p = tree.find(*parent);
        if (p == nullptr) {
            throw std::invalid_argument("unknown object: " + *parent);
        }
        *parent_node = p;
        children = &p->children;
    }
    for (const ObjectNode& n : *children) {
        out.push_back(&n);
    }
    return out;
}

bool exempt_pair(const AutoRules& rules, const std::string& a, const std::string& b) {
    return std::any_of(rules.collision_exempt.begin(), rules.collision_exempt.end(), [&](const auto& p) {
        return (p.first == a && p.second == b) || (p.first == b && p.second == a);
    });
}

}  // namespace

LayoutProblem assemble(const SceneTree& tree, const std::optional<std::string>& parent,
                       std::span<const RelationTerm> user_terms, const AutoRules& rules) {
    const ObjectNode* parent_node = nullptr;
    const std::vector<const ObjectNode*> nodes = level_nodes(tree, parent, &parent_node);

    Domain domain = tree.domain;
    double z_offset = 0.0;
    if (parent_node != nullptr) {
        domain = Domain::centered_rectangle(parent_node->extent.dx, parent_node->extent.dy, rules.child_clearance);
        z_offset = parent_node->extent.dz / 2.0;
    }

    std::vector<ProblemObject> objects;
    objects.reserve(nodes.size());
    for (const ObjectNode* n : nodes) {
        const Pose& local = n->local_pose;
        objects.push_back({n->id, n->category, n->extent, n->fixed, local.with_z(local.z() - z_offset)});
    }

    const auto on_level = [&](const std::string& id) {
        return std::any_of(nodes.begin(), nodes.end(), [&](const ObjectNode* n) { return n->id == id; });
    };

    std::vector<ProblemTerm> terms;
    for (const RelationTerm& t : user_terms) {
        const auto issues = t.problems();
        if (!issues.empty()) {
            throw std::invalid_argument("invalid term " + t.label() + ": " + issues.front());
        }
        for (const std::string& id : t.participants) {
            if (!on_level(id)) {
                throw std::invalid_argument("cross-level term " + t.label() + " references " + id);
            }
        }
        terms.push_back({t, {}, false});
    }
    if (rules.collision) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                if (exempt_pair(rules, nodes[i]->id, nodes[j]->id)) {
                    continue;
                }
                RelationTerm t;
                t.kind = RelationKind::Collision;
                t.participants = {nodes[i]->id, nodes[j]->id};
                t.mode = Hard{Comparator::LessEq, 0.0, 0.0};
                terms.push_back({std::move(t), {}, true});
            }
        }
    }
    if (rules.containment) {
        for (const ObjectNode* n : nodes) {
            if (std::find(rules.containment_exempt.begin(), rules.containment_exempt.end(), n->id) !=
                rules.containment_exempt.end()) {
                continue;
            }
            RelationTerm t;
            t.kind = RelationKind::Containment;
            t.participants = {n->id};
            t.mode = Hard{Comparator::LessEq, 0.0, 0.0};
            terms.push_back({std::move(t), {}, true});
        }
    }
    return {std::move(domain), std::move(objects), std::move(terms), parent, z_offset};
}

Breakdown collect(const LayoutProblem& problem, std::span<const double> term_values) {
    Breakdown out;
    out.soft_scores.reserve(problem.soft_count());
    out.violations.reserve(problem.hard_count());
    for (std::size_t t = 0; t < problem.terms().size(); ++t) {
        if (problem.terms()[t].term.soft()) {
            out.soft_scores.push_back(term_values[t]);
            out.objective += term_values[t];
        } else {
            out.violations.push_back(term_values[t]);
            out.total_violation += term_values[t];
        }
    }
    return out;
}

Breakdown evaluate(const LayoutProblem& problem, std::span<const Pose> poses) {
    std::vector<double> values(problem.terms().size());
    for (std::size_t t = 0; t < values.size(); ++t) {
        values[t] = problem.term_value(t, poses);
    }
    return collect(problem, values);
}

Breakdown evaluate(const LayoutProblem& problem, const Layout& layout) {
    const std::vector<Pose> poses = problem.poses_of(layout);
    return evaluate(problem, std::span<const Pose>(poses));
}

bool is_feasible(const Breakdown& breakdown, double tol) { return breakdown.total_violation <= tol; }

}  // namespace layoutforge
