#include "layoutforge/relations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace layoutforge {

namespace {

constexpr std::array<std::pair<RelationKind, std::string_view>, 8> kKindNames{{
    {RelationKind::Distance, "distance"},
    {RelationKind::RelativeOrientation, "relative_orientation"},
    {RelationKind::Alignment, "alignment"},
    {RelationKind::Proximity, "proximity"},
    {RelationKind::Overlap, "overlap"},
    {RelationKind::Symmetry, "symmetry"},
    {RelationKind::Containment, "containment"},
    {RelationKind::Collision, "collision"},
}};

}  // namespace

std::string_view to_string(RelationKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

std::string_view to_string(Axis axis) {
    switch (axis) {
    case Axis::X:
        return "x";
    case Axis::Y:
        return "y";
    case Axis::Z:
        return "z";
    }
    return "x";
}

std::string_view to_string(Comparator cmp) {
    switch (cmp) {
    case Comparator::LessEq:
        return "less_eq";
    case Comparator::GreaterEq:
        return "greater_eq";
    case Comparator::WithinTol:
        return "within_tol";
    }
    return "less_eq";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<Axis> axis_from_string(std::string_view name) {
    if (name == "x") return Axis::X;
    if (name == "y") return Axis::Y;
    if (name == "z") return Axis::Z;
    return std::nullopt;
}

std::optional<Comparator> comparator_from_string(std::string_view name) {
    if (name == "less_eq") return Comparator::LessEq;
    if (name == "greater_eq") return Comparator::GreaterEq;
    if (name == "within_tol") return Comparator::WithinTol;
    return std::nullopt;
}

bool is_plumbing(RelationKind kind) { return kind == RelationKind::Containment || kind == RelationKind::Collision; }

namespace {

std::size_t min_arity(RelationKind kind) {
    switch (kind) {
    case RelationKind::Containment:
        return 1;
    default:
        return 2;
    }
}

bool fixed_arity(RelationKind kind) { return kind != RelationKind::Alignment && kind != RelationKind::Symmetry; }

std::vector<std::string> pairing_problems(const RelationTerm& term) {
    const std::size_t n = term.participants.size();
    const bool rotational = std::holds_alternative<Rotational>(term.params.symmetry);
    // reflection pairs are unordered and may pair an object with itself;
    // rotational pairs form a permutation (source -> image)
    std::vector<int> as_source(n, 0);
    std::vector<int> as_target(n, 0);
    std::vector<int> appearances(n, 0);
    for (const auto& [i, j] : term.params.pairs) {
        if (i >= n || j >= n) {
            return {"symmetry pair index out of range"};
        }
        ++as_source[i];
        ++as_target[j];
        ++appearances[i];
        if (j != i) {
            ++appearances[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool covered = rotational ? (as_source[i] == 1 && as_target[i] == 1) : appearances[i] == 1;
        if (!covered) {
            return {"symmetry pairs must cover every participant exactly once"};
        }
    }
    return {};
}

}  // namespace

std::vector<std::string> RelationTerm::problems() const {
    std::vector<std::string> out;
    const std::size_t n = participants.size();
    if (fixed_arity(kind) ? n != min_arity(kind) : n < min_arity(kind)) {
        out.push_back(std::string(to_string(kind)) + " has wrong participant count " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (participants[i] == participants[j]) {
                out.push_back("participant listed twice: " + participants[i]);
            }
        }
    }
    if (!std::isfinite(params.target)) {
        out.emplace_back("target must be finite");
    }
    if (kind == RelationKind::Alignment && params.axis == Axis::Z) {
        out.emplace_back("alignment axis must be x or y");
    }
    if (kind == RelationKind::Symmetry) {
        if (const auto* r = std::get_if<Reflection>(&params.symmetry)) {
            if (std::abs(norm(r->normal) - 1.0) > 1e-9) {
                out.emplace_back("reflection normal must be a unit vector");
            }
        } else if (std::get<Rotational>(params.symmetry).order < 1) {
            out.emplace_back("rotational order must be at least 1");
        }
        if (!params.pairs.empty()) {
            auto more = pairing_problems(*this);
            out.insert(out.end(), more.begin(), more.end());
        }
    }
    if (const auto* s = std::get_if<Soft>(&mode)) {
        if (!std::isfinite(s->weight) || s->weight < 0.0) {
            out.emplace_back("soft weight must be finite and non-negative");
        }
    } else {
        const Hard& h = std::get<Hard>(mode);
        if (!std::isfinite(h.threshold)) {
            out.emplace_back("hard threshold must be finite");
        }
        if (!std::isfinite(h.tolerance) || h.tolerance < 0.0) {
            out.emplace_back("hard tolerance must be finite and non-negative");
        }
    }
    return out;
}

std::string RelationTerm::label() const {
    std::string out(to_string(kind));
    out += '(';
    for (std::size_t i = 0; i < participants.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += participants[i];
    }
    out += ')';
    return out;
}

RelationTerm proximity_constraint(std::string a, std::string b, double epsilon) {
    RelationTerm t;
    t.kind = RelationKind::Proximity;
    t.participants = {std::move(a), std::move(b)};
    t.mode = Hard{Comparator::LessEq, epsilon, 0.0};
    return t;
}

namespace {

double vertical_gap(const PlacedBox& a, const PlacedBox& b) {
    const auto [alo, ahi] = vertical_interval(a.pose, a.extent);
    const auto [blo, bhi] = vertical_interval(b.pose, b.extent);
    return std::max({0.0, blo - ahi, alo - bhi});
}

}  // namespace

double measure_distance(const PlacedBox& a, const PlacedBox& b) {
    const Quad fa = world_footprint(a.pose, a.extent);
    const Quad fb = world_footprint(b.pose, b.extent);
    const double planar = polygon_distance(fa, fb);
    const double gz = vertical_gap(a, b);
    return gz == 0.0 ? planar : std::hypot(planar, gz);
}

double measure_rel_orientation(const PlacedBox& a, const PlacedBox& b, double target) {
    return std::abs(wrap_difference(b.pose.yaw() - a.pose.yaw() - target));
}

double measure_alignment(std::span<const PlacedBox> objects, Axis axis) {
    // objects lined up along x share their y coordinate, and vice versa
    const auto coord = [axis](const PlacedBox& b) { return axis == Axis::X ? b.pose.y() : b.pose.x(); };
    if (objects.empty()) {
        return 0.0;
    }
    double mean = 0.0;
    for (const PlacedBox& b : objects) {
        mean += coord(b);
    }
    mean /= static_cast<double>(objects.size());
    double sum = 0.0;
    for (const PlacedBox& b : objects) {
        const double d = coord(b) - mean;
        sum += d * d;
    }
    return sum;
}

double measure_proximity(const PlacedBox& a, const PlacedBox& b) { return measure_distance(a, b); }

double projection_half_width(const PlacedBox& box, Axis axis) {
    const Mat3 r = box.pose.rotation();
    const auto row = static_cast<std::size_t>(axis);
    return 0.5 * (std::abs(r[row][0]) * box.extent.dx + std::abs(r[row][1]) * box.extent.dy +
                  std::abs(r[row][2]) * box.extent.dz);
}

double measure_overlap(const PlacedBox& a, const PlacedBox& b, Axis axis) {
    const auto center = [axis](const PlacedBox& p) {
        switch (axis) {
        case Axis::X:
            return p.pose.x();
        case Axis::Y:
            return p.pose.y();
        case Axis::Z:
            return p.pose.z();
        }
        return 0.0;
    };
    const double ha = projection_half_width(a, axis);
    const double hb = projection_half_width(b, axis);
    const double lo = std::max(center(a) - ha, center(b) - hb);
    const double hi = std::min(center(a) + ha, center(b) + hb);
    return std::max(0.0, hi - lo);
}

namespace {

Vec3 transform_center(const SymmetrySpec& spec, Vec3 c) {
    if (const auto* r = std::get_if<Reflection>(&spec)) {
        const double d = (c.x - r->point.x) * r->normal.x + (c.y - r->point.y) * r->normal.y;
        return {c.x - 2.0 * d * r->normal.x, c.y - 2.0 * d * r->normal.y, c.z};
    }
    const Rotational& rot = std::get<Rotational>(spec);
    const double angle = kTwoPi / static_cast<double>(rot.order);
    const double cs = std::cos(angle);
    const double sn = std::sin(angle);
    const double dx = c.x - rot.center.x;
    const double dy = c.y - rot.center.y;
    return {rot.center.x + cs * dx - sn * dy, rot.center.y + sn * dx + cs * dy, c.z};
}

}  // namespace

Pairing auto_pairing(std::span<const PlacedBox> objects, std::span<const std::string> categories,
                     const SymmetrySpec& spec, double max_match) {
    const std::size_t n = objects.size();
    if (categories.size() != n) {
        throw std::invalid_argument("unpairable set: categories missing");
    }
    const bool rotational = std::holds_alternative<Rotational>(spec);
    std::vector<bool> taken(n, false);
    Pairing out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!rotational && taken[i]) {
            continue;
        }
        const Vec3 image = transform_center(spec, objects[i].center());
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            // reflection partners are distinct objects, so odd counts cannot pair up
            if (taken[j] || categories[j] != categories[i] || (!rotational && j == i)) {
                continue;
            }
            const double d = norm(image - objects[j].center());
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best == n || best_d > max_match) {
            throw std::invalid_argument("unpairable set");
        }
        taken[best] = true;
        if (!rotational) {
            taken[i] = true;
        }
        out.emplace_back(i, best);
    }
    return out;
}

double measure_symmetry(std::span<const PlacedBox> objects, std::span<const std::string> categories,
                        const SymmetrySpec& spec, const Pairing& pairs, double max_match) {
    const Pairing used = pairs.empty() ? auto_pairing(objects, categories, spec, max_match) : pairs;
    double sum = 0.0;
    for (const auto& [i, j] : used) {
        sum += norm(transform_center(spec, objects[i].center()) - objects[j].center());
    }
    return sum;
}

double measure_containment(const PlacedBox& a, const Domain& domain) {
    double sum = 0.0;
    for (const Vec2& corner : world_footprint(a.pose, a.extent)) {
        sum += point_polygon_distance(domain.boundary, corner);
    }
    const double top = vertical_interval(a.pose, a.extent).second;
    return sum + std::max(0.0, top - domain.height);
}

double measure_collision(const PlacedBox& a, const PlacedBox& b) {
    const auto [alo, ahi] = vertical_interval(a.pose, a.extent);
    const auto [blo, bhi] = vertical_interval(b.pose, b.extent);
    if (std::min(ahi, bhi) - std::max(alo, blo) <= 0.0) {
        return 0.0;
    }
    return intersection_area(world_footprint(a.pose, a.extent), world_footprint(b.pose, b.extent));
}

double measure_term(const RelationTerm& term, std::span<const PlacedBox> boxes, std::span<const std::string> categories,
                    const Domain& domain) {
    switch (term.kind) {
    case RelationKind::Distance:
        return measure_distance(boxes[0], boxes[1]);
    case RelationKind::RelativeOrientation:
        return measure_rel_orientation(boxes[0], boxes[1], term.params.target);
    case RelationKind::Alignment:
        return measure_alignment(boxes, term.params.axis);
    case RelationKind::Proximity:
        return measure_proximity(boxes[0], boxes[1]);
    case RelationKind::Overlap:
        return measure_overlap(boxes[0], boxes[1], term.params.axis);
    case RelationKind::Symmetry:
        return measure_symmetry(boxes, categories, term.params.symmetry, term.params.pairs, domain.diagonal());
    case RelationKind::Containment:
        return measure_containment(boxes[0], domain);
    case RelationKind::Collision:
        return measure_collision(boxes[0], boxes[1]);
    }
    return 0.0;
}

double shape_measure(const RelationTerm& term, double measure) {
    if (const auto* soft = std::get_if<Soft>(&term.mode)) {
        double shaped = measure;
        switch (term.kind) {
        case RelationKind::Distance:
        case RelationKind::Overlap:
            shaped = (measure - term.params.target) * (measure - term.params.target);
            break;
        case RelationKind::Proximity:
            shaped = measure * measure;
            break;
        default:
            break;
        }
        return soft->weight * shaped;
    }
    const Hard& hard = std::get<Hard>(term.mode);
    switch (hard.comparator) {
    case Comparator::LessEq:
        return std::max(0.0, measure - hard.threshold);
    case Comparator::GreaterEq:
        return std::max(0.0, hard.threshold - measure);
    case Comparator::WithinTol:
        return std::max(0.0, std::abs(measure - hard.threshold) - hard.tolerance);
    }
    return 0.0;
}

TermOutcome evaluate_term(const RelationTerm& term, const Layout& layout, std::span<const ObjectInfo> objects,
                          const Domain& domain) {
    std::vector<PlacedBox> boxes;
    std::vector<std::string> categories;
    boxes.reserve(term.participants.size());
    categories.reserve(term.participants.size());
    for (const std::string& id : term.participants) {
        const auto it = std::find_if(objects.begin(), objects.end(), [&](const ObjectInfo& o) { return o.id == id; });
        if (it == objects.end()) {
            throw std::out_of_range("unknown object: " + id);
        }
        boxes.push_back({layout.at(id), it->extent});
        categories.push_back(it->category);
    }
    const double value = shape_measure(term, measure_term(term, boxes, categories, domain));
    if (term.soft()) {
        return SoftScore{value};
    }
    return HardViolation{value};
}

}  // namespace layoutforge
