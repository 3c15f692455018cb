#include "layoutforge/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

#include "layoutforge/format.hpp"

namespace layoutforge {

namespace {

using Json = nlohmann::ordered_json;

std::string pointer_token(std::string_view key) {
    std::string out;
    for (const char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

std::string child_path(const std::string& path, std::string_view key) { return path + "/" + pointer_token(key); }
std::string child_path(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

// Object reader that remembers which keys were consumed so leftovers can be
// reported as unknown fields.
class Fields {
public:
    Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw SpecError(path_, "expected an object");
        }
    }

    const std::string& path() const { return path_; }
    std::string at(std::string_view key) const { return child_path(path_, key); }

    const Json* optional(const char* key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const Json& required(const char* key) {
        const Json* v = optional(key);
        if (v == nullptr) {
            throw SpecError(path_, std::string("missing field '") + key + "'");
        }
        return *v;
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (used_.count(item.key()) == 0) {
                throw SpecError(at(item.key()), "unknown field");
            }
        }
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string, std::less<>> used_;
};

double get_number(const Json& j, const std::string& path) {
    if (!j.is_number()) {
        throw SpecError(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw SpecError(path, "expected a finite number");
    }
    return v;
}

long get_integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) {
        throw SpecError(path, "expected an integer");
    }
    return j.get<long>();
}

std::uint64_t get_unsigned(const Json& j, const std::string& path) {
    if (!j.is_number_unsigned()) {
        throw SpecError(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

bool get_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) {
        throw SpecError(path, "expected true or false");
    }
    return j.get<bool>();
}

std::string get_string(const Json& j, const std::string& path) {
    if (!j.is_string()) {
        throw SpecError(path, "expected a string");
    }
    return j.get<std::string>();
}

const Json& get_array(const Json& j, const std::string& path) {
    if (!j.is_array()) {
        throw SpecError(path, "expected an array");
    }
    return j;
}

Vec2 get_vec2(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) {
        throw SpecError(path, "expected [x, y]");
    }
    return {get_number(j[0], child_path(path, 0)), get_number(j[1], child_path(path, 1))};
}

double number_or(Fields& f, const char* key, double fallback) {
    const Json* v = f.optional(key);
    return v ? get_number(*v, f.at(key)) : fallback;
}

bool bool_or(Fields& f, const char* key, bool fallback) {
    const Json* v = f.optional(key);
    return v ? get_bool(*v, f.at(key)) : fallback;
}

// null and a missing key both mean "automatic"
std::optional<double> optional_number(Fields& f, const char* key) {
    const Json* v = f.optional(key);
    if (v == nullptr || v->is_null()) {
        return std::nullopt;
    }
    return get_number(*v, f.at(key));
}

double num(double v) { return v == 0.0 ? 0.0 : v; }

Json vec2_json(Vec2 v) { return Json::array({num(v.x), num(v.y)}); }

// ---------------------------------------------------------------------------
// Spec sections

Domain parse_domain(const Json& j) {
    Fields f(j, "/domain");
    Domain d;
    const std::string bpath = f.at("boundary");
    for (const Json& p : get_array(f.required("boundary"), bpath)) {
        d.boundary.push_back(get_vec2(p, child_path(bpath, d.boundary.size())));
    }
    d.height = get_number(f.required("height"), f.at("height"));
    f.finish();
    for (const std::string& p : d.problems()) {
        throw SpecError("/domain", p);
    }
    return d;
}

Json domain_json(const Domain& d) {
    Json boundary = Json::array();
    for (const Vec2& p : d.boundary) {
        boundary.push_back(vec2_json(p));
    }
    return Json{{"boundary", boundary}, {"height", num(d.height)}};
}

Extent parse_dims(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) {
        throw SpecError(path, "expected [dx, dy, dz]");
    }
    Extent e{get_number(j[0], child_path(path, 0)), get_number(j[1], child_path(path, 1)),
             get_number(j[2], child_path(path, 2))};
    if (!e.valid()) {
        throw SpecError(path, "dimensions must be positive");
    }
    return e;
}

Json dims_json(const Extent& e) { return Json::array({e.dx, e.dy, e.dz}); }

Pose parse_fixed_pose(const Json& j, const std::string& path) {
    Fields f(j, path);
    const double x = get_number(f.required("x"), f.at("x"));
    const double y = get_number(f.required("y"), f.at("y"));
    const double yaw = number_or(f, "yaw", 0.0);
    const double pitch = number_or(f, "pitch", 0.0);
    const double roll = number_or(f, "roll", 0.0);
    f.finish();
    return Pose(x, y, 0.0, yaw, pitch, roll);
}

Json fixed_pose_json(const Pose& p) {
    return Json{{"x", num(p.x())},
                {"y", num(p.y())},
                {"yaw", num(p.yaw())},
                {"pitch", num(p.pitch())},
                {"roll", num(p.roll())}};
}

SpecObject parse_object(const Json& j, const std::string& path) {
    Fields f(j, path);
    SpecObject o;
    o.id = get_string(f.required("id"), f.at("id"));
    if (o.id.empty()) {
        throw SpecError(f.at("id"), "empty id");
    }
    o.category = get_string(f.required("category"), f.at("category"));
    o.dims = parse_dims(f.required("dims"), f.at("dims"));
    if (const Json* p = f.optional("parent"); p && !p->is_null()) {
        o.parent = get_string(*p, f.at("parent"));
    }
    if (const Json* p = f.optional("fixed_pose"); p && !p->is_null()) {
        o.fixed_pose = parse_fixed_pose(*p, f.at("fixed_pose"));
    }
    f.finish();
    return o;
}

Json object_json(const SpecObject& o) {
    return Json{{"id", o.id},
                {"category", o.category},
                {"dims", dims_json(o.dims)},
                {"parent", o.parent ? Json(*o.parent) : Json(nullptr)},
                {"fixed_pose", o.fixed_pose ? fixed_pose_json(*o.fixed_pose) : Json(nullptr)}};
}

SymmetrySpec parse_symmetry(const Json& j, const std::string& path) {
    Fields f(j, path);
    const std::string type = get_string(f.required("type"), f.at("type"));
    SymmetrySpec out;
    if (type == "reflection") {
        Reflection r;
        if (const Json* v = f.optional("point")) {
            r.point = get_vec2(*v, f.at("point"));
        }
        if (const Json* v = f.optional("normal")) {
            r.normal = get_vec2(*v, f.at("normal"));
        }
        out = r;
    } else if (type == "rotational") {
        Rotational r;
        if (const Json* v = f.optional("center")) {
            r.center = get_vec2(*v, f.at("center"));
        }
        if (const Json* v = f.optional("order")) {
            r.order = static_cast<int>(get_integer(*v, f.at("order")));
        }
        out = r;
    } else {
        throw SpecError(f.at("type"), "unknown symmetry type '" + type + "'");
    }
    f.finish();
    return out;
}

Json symmetry_json(const SymmetrySpec& s) {
    if (const auto* r = std::get_if<Reflection>(&s)) {
        return Json{{"type", "reflection"}, {"point", vec2_json(r->point)}, {"normal", vec2_json(r->normal)}};
    }
    const auto& r = std::get<Rotational>(s);
    return Json{{"type", "rotational"}, {"center", vec2_json(r.center)}, {"order", r.order}};
}

TermParams parse_params(const Json& j, const std::string& path) {
    Fields f(j, path);
    TermParams p;
    p.target = number_or(f, "target", p.target);
    if (const Json* v = f.optional("axis")) {
        const std::string name = get_string(*v, f.at("axis"));
        const auto axis = axis_from_string(name);
        if (!axis) {
            throw SpecError(f.at("axis"), "unknown axis '" + name + "'");
        }
        p.axis = *axis;
    }
    if (const Json* v = f.optional("symmetry")) {
        p.symmetry = parse_symmetry(*v, f.at("symmetry"));
    }
    if (const Json* v = f.optional("pairs")) {
        const std::string ppath = f.at("pairs");
        for (const Json& pair : get_array(*v, ppath)) {
            const std::string here = child_path(ppath, p.pairs.size());
            if (!pair.is_array() || pair.size() != 2) {
                throw SpecError(here, "expected [i, j]");
            }
            p.pairs.emplace_back(get_unsigned(pair[0], child_path(here, 0)), get_unsigned(pair[1], child_path(here, 1)));
        }
    }
    f.finish();
    return p;
}

Json params_json(const TermParams& p) {
    Json pairs = Json::array();
    for (const auto& [a, b] : p.pairs) {
        pairs.push_back(Json::array({a, b}));
    }
    return Json{{"target", num(p.target)},
                {"axis", std::string(to_string(p.axis))},
                {"symmetry", symmetry_json(p.symmetry)},
                {"pairs", pairs}};
}

RelationTerm parse_term(const Json& j, const std::string& path) {
    Fields f(j, path);
    RelationTerm t;
    const std::string kind = get_string(f.required("kind"), f.at("kind"));
    const auto k = relation_kind_from_string(kind);
    if (!k) {
        throw SpecError(f.at("kind"), "unknown relation kind '" + kind + "'");
    }
    t.kind = *k;
    const std::string ppath = f.at("participants");
    for (const Json& id : get_array(f.required("participants"), ppath)) {
        t.participants.push_back(get_string(id, child_path(ppath, t.participants.size())));
    }
    if (const Json* v = f.optional("params")) {
        t.params = parse_params(*v, f.at("params"));
    }
    const std::string mode = [&] {
        const Json* v = f.optional("mode");
        return v ? get_string(*v, f.at("mode")) : std::string("soft");
    }();
    if (mode == "soft") {
        t.mode = Soft{number_or(f, "weight", 1.0)};
        for (const char* key : {"comparator", "threshold", "tolerance"}) {
            if (f.optional(key)) {
                throw SpecError(f.at(key), "only valid for hard terms");
            }
        }
    } else if (mode == "hard") {
        Hard h;
        if (const Json* v = f.optional("comparator")) {
            const std::string name = get_string(*v, f.at("comparator"));
            const auto cmp = comparator_from_string(name);
            if (!cmp) {
                throw SpecError(f.at("comparator"), "unknown comparator '" + name + "'");
            }
            h.comparator = *cmp;
        }
        h.threshold = number_or(f, "threshold", t.kind == RelationKind::Proximity ? kDefaultProximityEpsilon : 0.0);
        h.tolerance = number_or(f, "tolerance", 0.0);
        if (f.optional("weight")) {
            throw SpecError(f.at("weight"), "only valid for soft terms");
        }
        t.mode = h;
    } else {
        throw SpecError(f.at("mode"), "mode must be 'soft' or 'hard'");
    }
    f.finish();
    for (const std::string& p : t.problems()) {
        throw SpecError(path, p);
    }
    return t;
}

Json term_json(const RelationTerm& t) {
    Json out{{"kind", std::string(to_string(t.kind))},
             {"participants", t.participants},
             {"params", params_json(t.params)}};
    if (const auto* s = std::get_if<Soft>(&t.mode)) {
        out["mode"] = "soft";
        out["weight"] = num(s->weight);
    } else {
        const Hard& h = std::get<Hard>(t.mode);
        out["mode"] = "hard";
        out["comparator"] = std::string(to_string(h.comparator));
        out["threshold"] = num(h.threshold);
        out["tolerance"] = num(h.tolerance);
    }
    return out;
}

AnnealConfig parse_solver(const Json& j) {
    Fields f(j, "/solver");
    AnnealConfig c;
    if (const Json* v = f.optional("seed")) {
        c.seed = get_unsigned(*v, f.at("seed"));
    }
    c.t0 = optional_number(f, "t0");
    c.alpha = number_or(f, "alpha", c.alpha);
    if (const Json* v = f.optional("iters_per_temp"); v && !v->is_null()) {
        c.iters_per_temp = get_integer(*v, f.at("iters_per_temp"));
    }
    c.t_min_ratio = number_or(f, "t_min_ratio", c.t_min_ratio);
    if (const Json* v = f.optional("max_evals")) {
        c.max_evals = get_integer(*v, f.at("max_evals"));
    }
    if (const Json* v = f.optional("move_probs")) {
        Fields m(*v, f.at("move_probs"));
        c.move_probs.translate = number_or(m, "translate", c.move_probs.translate);
        c.move_probs.rotate_jitter = number_or(m, "rotate_jitter", c.move_probs.rotate_jitter);
        c.move_probs.rotate_snap = number_or(m, "rotate_snap", c.move_probs.rotate_snap);
        c.move_probs.swap = number_or(m, "swap", c.move_probs.swap);
        m.finish();
    }
    c.sigma_xy = optional_number(f, "sigma_xy");
    c.sigma_yaw = number_or(f, "sigma_yaw", c.sigma_yaw);
    c.penalty_w0 = number_or(f, "penalty_w0", c.penalty_w0);
    if (const Json* v = f.optional("restarts")) {
        c.restarts = static_cast<int>(get_integer(*v, f.at("restarts")));
    }
    c.full_6dof = bool_or(f, "full_6dof", c.full_6dof);
    if (const Json* v = f.optional("snap"); v && !v->is_null()) {
        Fields s(*v, f.at("snap"));
        GridSpec g;
        g.xy_step = get_number(s.required("xy_step"), s.at("xy_step"));
        if (const Json* y = s.optional("yaw_set")) {
            g.yaw_set.clear();
            const std::string ypath = s.at("yaw_set");
            for (const Json& a : get_array(*y, ypath)) {
                g.yaw_set.push_back(get_number(a, child_path(ypath, g.yaw_set.size())));
            }
        }
        if (const Json* m = s.optional("max_objects")) {
            g.max_objects = get_unsigned(*m, s.at("max_objects"));
        }
        s.finish();
        c.snap = g;
    }
    f.finish();
    for (const std::string& p : c.problems()) {
        throw SpecError("/solver", p);
    }
    return c;
}

Json solver_json(const AnnealConfig& c) {
    const auto opt = [](const auto& v) { return v ? Json(*v) : Json(nullptr); };
    Json snap = nullptr;
    if (c.snap) {
        snap = Json{{"xy_step", c.snap->xy_step}, {"yaw_set", c.snap->yaw_set}, {"max_objects", c.snap->max_objects}};
    }
    return Json{{"seed", c.seed},
                {"t0", opt(c.t0)},
                {"alpha", c.alpha},
                {"iters_per_temp", opt(c.iters_per_temp)},
                {"t_min_ratio", c.t_min_ratio},
                {"max_evals", c.max_evals},
                {"move_probs",
                 Json{{"translate", c.move_probs.translate},
                      {"rotate_jitter", c.move_probs.rotate_jitter},
                      {"rotate_snap", c.move_probs.rotate_snap},
                      {"swap", c.move_probs.swap}}},
                {"sigma_xy", opt(c.sigma_xy)},
                {"sigma_yaw", c.sigma_yaw},
                {"penalty_w0", c.penalty_w0},
                {"restarts", c.restarts},
                {"full_6dof", c.full_6dof},
                {"snap", snap}};
}

AutoRules parse_auto_rules(const Json& j) {
    Fields f(j, "/auto_rules");
    AutoRules r;
    r.collision = bool_or(f, "collision", r.collision);
    r.containment = bool_or(f, "containment", r.containment);
    if (const Json* v = f.optional("collision_exempt")) {
        const std::string path = f.at("collision_exempt");
        for (const Json& pair : get_array(*v, path)) {
            const std::string here = child_path(path, r.collision_exempt.size());
            if (!pair.is_array() || pair.size() != 2) {
                throw SpecError(here, "expected [id, id]");
            }
            r.collision_exempt.emplace_back(get_string(pair[0], child_path(here, 0)),
                                            get_string(pair[1], child_path(here, 1)));
        }
    }
    if (const Json* v = f.optional("containment_exempt")) {
        const std::string path = f.at("containment_exempt");
        for (const Json& id : get_array(*v, path)) {
            r.containment_exempt.push_back(get_string(id, child_path(path, r.containment_exempt.size())));
        }
    }
    r.child_clearance = number_or(f, "child_clearance", r.child_clearance);
    if (!(r.child_clearance > 0.0)) {
        throw SpecError(f.at("child_clearance"), "must be positive");
    }
    f.finish();
    return r;
}

Json auto_rules_json(const AutoRules& r) {
    Json exempt = Json::array();
    for (const auto& [a, b] : r.collision_exempt) {
        exempt.push_back(Json::array({a, b}));
    }
    return Json{{"collision", r.collision},
                {"containment", r.containment},
                {"collision_exempt", exempt},
                {"containment_exempt", r.containment_exempt},
                {"child_clearance", r.child_clearance}};
}

TrajectoryCommand parse_trajectory(const Json& j, const std::string& path) {
    Fields f(j, path);
    TrajectoryCommand c;
    const std::string name = get_string(f.required("template"), f.at("template"));
    const auto kind = trajectory_template_from_string(name);
    if (!kind) {
        throw SpecError(f.at("template"), "unknown trajectory template '" + name + "'");
    }
    c.kind = *kind;
    c.frames = static_cast<int>(get_integer(f.required("frames"), f.at("frames")));
    c.span = number_or(f, "span", c.span);
    c.arc = number_or(f, "arc", c.arc);
    c.travel = number_or(f, "travel", c.travel);
    c.rise = number_or(f, "rise", c.rise);

    Fields a(f.required("anchor"), f.at("anchor"));
    c.anchor.object = get_string(a.required("object"), a.at("object"));
    if (const Json* v = a.optional("relation")) {
        const std::string rel = get_string(*v, a.at("relation"));
        const auto r = anchor_relation_from_string(rel);
        if (!r) {
            throw SpecError(a.at("relation"), "unknown anchor relation '" + rel + "'");
        }
        c.anchor.relation = *r;
    }
    c.anchor.distance = optional_number(a, "distance");
    a.finish();

    if (const Json* v = f.optional("subject")) {
        if (v->is_string()) {
            if (v->get<std::string>() != "camera") {
                throw SpecError(f.at("subject"), "expected \"camera\" or an object subject");
            }
        } else {
            Fields s(*v, f.at("subject"));
            ObjectSubject o;
            o.id = get_string(s.required("object"), s.at("object"));
            o.yaw_hold = bool_or(s, "yaw_hold", false);
            s.finish();
            c.subject = o;
        }
    }
    f.finish();
    for (const std::string& p : c.problems()) {
        throw SpecError(path, p);
    }
    return c;
}

Json trajectory_json(const TrajectoryCommand& c) {
    Json subject = "camera";
    if (const auto* o = std::get_if<ObjectSubject>(&c.subject)) {
        subject = Json{{"object", o->id}, {"yaw_hold", o->yaw_hold}};
    }
    return Json{{"template", std::string(to_string(c.kind))},
                {"frames", c.frames},
                {"span", c.span},
                {"arc", c.arc},
                {"travel", c.travel},
                {"rise", c.rise},
                {"anchor",
                 Json{{"object", c.anchor.object},
                      {"relation", std::string(to_string(c.anchor.relation))},
                      {"distance", c.anchor.distance ? Json(*c.anchor.distance) : Json(nullptr)}}},
                {"subject", subject}};
}

Json parse_document(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is 1-based; recover line and column for the diagnostic
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw SpecError("line " + std::to_string(line) + ", column " + std::to_string(col), "syntax error");
    }
}

void check_version(Fields& f, int expected) {
    const long v = get_integer(f.required("version"), f.at("version"));
    if (v != expected) {
        throw SpecError(f.at("version"), "unsupported version " + std::to_string(v));
    }
}

void check_references(const SceneSpec& spec) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        if (!index.emplace(spec.objects[i].id, i).second) {
            throw SpecError(child_path("/objects", i) + "/id", "duplicate id '" + spec.objects[i].id + "'");
        }
    }
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        const SpecObject& o = spec.objects[i];
        if (o.parent && index.count(*o.parent) == 0) {
            throw SpecError(child_path("/objects", i) + "/parent",
                            "object " + std::to_string(i) + " has unknown parent '" + *o.parent + "'");
        }
    }
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        // a parent chain longer than the object count must revisit a node
        std::optional<std::string> p = spec.objects[i].parent;
        for (std::size_t steps = 0; p; ++steps) {
            if (steps > spec.objects.size()) {
                throw SpecError(child_path("/objects", i) + "/parent", "parent cycle through '" + spec.objects[i].id + "'");
            }
            p = spec.objects[index.at(*p)].parent;
        }
    }
    const auto known = [&](const std::string& id) { return index.count(id) > 0; };
    for (std::size_t i = 0; i < spec.terms.size(); ++i) {
        const RelationTerm& t = spec.terms[i];
        const std::string path = child_path("/terms", i);
        for (std::size_t k = 0; k < t.participants.size(); ++k) {
            if (!known(t.participants[k])) {
                throw SpecError(child_path(path + "/participants", k),
                                "term " + std::to_string(i) + " references unknown object '" + t.participants[k] + "'");
            }
        }
        for (const std::string& id : t.participants) {
            if (spec.objects[index.at(id)].parent != spec.objects[index.at(t.participants.front())].parent) {
                throw SpecError(path, "term " + std::to_string(i) + " mixes objects from different levels");
            }
        }
    }
    for (std::size_t i = 0; i < spec.auto_rules.collision_exempt.size(); ++i) {
        for (const std::string& id : {spec.auto_rules.collision_exempt[i].first, spec.auto_rules.collision_exempt[i].second}) {
            if (!known(id)) {
                throw SpecError(child_path("/auto_rules/collision_exempt", i), "unknown object '" + id + "'");
            }
        }
    }
    for (std::size_t i = 0; i < spec.auto_rules.containment_exempt.size(); ++i) {
        if (!known(spec.auto_rules.containment_exempt[i])) {
            throw SpecError(child_path("/auto_rules/containment_exempt", i),
                            "unknown object '" + spec.auto_rules.containment_exempt[i] + "'");
        }
    }
    for (std::size_t i = 0; i < spec.trajectories.size(); ++i) {
        const TrajectoryCommand& c = spec.trajectories[i];
        const std::string path = child_path("/trajectories", i);
        if (!known(c.anchor.object)) {
            throw SpecError(path + "/anchor/object", "trajectory " + std::to_string(i) +
                                                         " references unknown object '" + c.anchor.object + "'");
        }
        if (const auto* o = std::get_if<ObjectSubject>(&c.subject); o && !known(o->id)) {
            throw SpecError(path + "/subject/object",
                            "trajectory " + std::to_string(i) + " references unknown object '" + o->id + "'");
        }
    }
}

Json pose_json(const Pose& p) {
    return Json{{"x", num(p.x())},     {"y", num(p.y())},         {"z", num(p.z())},
                {"yaw", num(p.yaw())}, {"pitch", num(p.pitch())}, {"roll", num(p.roll())}};
}

Pose parse_pose(const Json& j, const std::string& path) {
    Fields f(j, path);
    const auto get = [&](const char* key) { return get_number(f.required(key), f.at(key)); };
    const double x = get("x");
    const double y = get("y");
    const double z = get("z");
    const double yaw = get("yaw");
    const double pitch = get("pitch");
    const double roll = get("roll");
    f.finish();
    return Pose(x, y, z, yaw, pitch, roll);
}

Program parse_program(const Json& j, const std::string& path) {
    Fields f(j, path);
    Program p;
    p.category = get_string(f.required("category"), f.at("category"));
    const Json& params = f.required("params");
    if (!params.is_object()) {
        throw SpecError(f.at("params"), "expected an object");
    }
    for (const auto& item : params.items()) {
        p.params[item.key()] = get_number(item.value(), child_path(f.at("params"), item.key()));
    }
    f.finish();
    return p;
}

Predicate parse_predicate(const Json& j, const std::string& path) {
    Fields f(j, path);
    Predicate p;
    p.field = get_string(f.required("field"), f.at("field"));
    const std::string op = get_string(f.required("op"), f.at("op"));
    if (op == "equals") {
        p.op = PredicateOp::Equals;
        const Json& v = f.required("value");
        if (v.is_string()) {
            p.text = v.get<std::string>();
        } else {
            p.value = get_number(v, f.at("value"));
        }
    } else if (op == "in_range") {
        p.op = PredicateOp::InRange;
        p.lo = number_or(f, "min", -HUGE_VAL);
        p.hi = number_or(f, "max", HUGE_VAL);
        if (p.lo > p.hi) {
            throw SpecError(path, "min exceeds max");
        }
    } else {
        throw SpecError(f.at("op"), "op must be 'equals' or 'in_range'");
    }
    f.finish();
    return p;
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string svg_number(double v) { return format_fixed(v, 6); }

template <typename Points>
std::string svg_points(const Domain& domain, const Points& points) {
    std::string out;
    for (const Vec2& p : points) {
        const Vec2 q = svg_page_point(domain, p);
        if (!out.empty()) {
            out += ' ';
        }
        out += svg_number(q.x) + ',' + svg_number(q.y);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

SceneSpec parse_spec(std::string_view text) {
    const Json doc = parse_document(text);
    Fields f(doc, "");
    SceneSpec spec;
    check_version(f, kSpecVersion);
    spec.domain = parse_domain(f.required("domain"));
    const Json& objects = get_array(f.required("objects"), "/objects");
    for (std::size_t i = 0; i < objects.size(); ++i) {
        spec.objects.push_back(parse_object(objects[i], child_path("/objects", i)));
    }
    if (const Json* v = f.optional("terms")) {
        const Json& terms = get_array(*v, "/terms");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            spec.terms.push_back(parse_term(terms[i], child_path("/terms", i)));
        }
    }
    if (const Json* v = f.optional("solver")) {
        spec.solver = parse_solver(*v);
    }
    if (const Json* v = f.optional("auto_rules")) {
        spec.auto_rules = parse_auto_rules(*v);
    }
    if (const Json* v = f.optional("trajectories")) {
        const Json& list = get_array(*v, "/trajectories");
        for (std::size_t i = 0; i < list.size(); ++i) {
            spec.trajectories.push_back(parse_trajectory(list[i], child_path("/trajectories", i)));
        }
    }
    f.finish();
    check_references(spec);
    build_tree(spec);  // surfaces tree-level diagnostics
    return spec;
}

std::string serialize_spec(const SceneSpec& spec) {
    Json objects = Json::array();
    for (const SpecObject& o : spec.objects) {
        objects.push_back(object_json(o));
    }
    Json terms = Json::array();
    for (const RelationTerm& t : spec.terms) {
        terms.push_back(term_json(t));
    }
    Json trajectories = Json::array();
    for (const TrajectoryCommand& c : spec.trajectories) {
        trajectories.push_back(trajectory_json(c));
    }
    const Json doc{{"version", spec.version},
                   {"domain", domain_json(spec.domain)},
                   {"objects", objects},
                   {"terms", terms},
                   {"solver", solver_json(spec.solver)},
                   {"auto_rules", auto_rules_json(spec.auto_rules)},
                   {"trajectories", trajectories}};
    return doc.dump(2) + "\n";
}

SceneTree build_tree(const SceneSpec& spec) {
    SceneTree tree;
    tree.domain = spec.domain;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        index.emplace(spec.objects[i].id, i);
    }
    std::size_t placed = 0;
    std::function<ObjectNode(const SpecObject&)> make = [&](const SpecObject& o) {
        ++placed;
        ObjectNode node;
        node.id = o.id;
        node.category = o.category;
        node.extent = o.dims;
        node.fixed = o.fixed_pose.has_value();
        if (o.fixed_pose) {
            node.local_pose = *o.fixed_pose;
        }
        for (const SpecObject& child : spec.objects) {
            if (child.parent == o.id) {
                node.children.push_back(make(child));
            }
        }
        return node;
    };
    for (const SpecObject& o : spec.objects) {
        if (!o.parent) {
            tree.roots.push_back(make(o));
        }
    }
    if (placed != spec.objects.size()) {
        throw SpecError("/objects", "parent cycle");
    }
    ValidationReport report = validate_tree(tree);
    if (!report.ok()) {
        const Diagnostic& d = report.diagnostics.front();
        const auto it = index.find(d.node_id);
        throw SpecError(it == index.end() ? std::string("/domain") : child_path("/objects", it->second), d.message);
    }
    return std::move(report.tree);
}

// ---------------------------------------------------------------------------

SceneTree LayoutFile::tree() const {
    SceneTree out;
    out.domain = domain;
    std::function<ObjectNode(const LayoutObject&)> make = [&](const LayoutObject& o) {
        ObjectNode node{o.id, o.category, o.dims, o.local_pose, o.fixed, {}};
        for (const LayoutObject& child : objects) {
            if (child.parent == o.id) {
                node.children.push_back(make(child));
            }
        }
        return node;
    };
    for (const LayoutObject& o : objects) {
        if (!o.parent) {
            out.roots.push_back(make(o));
        }
    }
    return out;
}

LayoutFile make_layout_file(const HierarchySolution& solution) {
    LayoutFile out;
    out.domain = solution.tree.domain;
    out.feasible = solution.feasible();
    std::map<std::optional<std::string>, bool> level_ok;
    for (const LevelReport& level : solution.levels) {
        level_ok[level.parent] = level.feasible;
        LayoutLevel l;
        l.parent = level.parent;
        l.feasible = level.feasible;
        const Breakdown& b = level.solution.breakdown;
        l.objective = b.objective;
        l.total_violation = b.total_violation;
        for (std::size_t i = 0; i < b.soft_scores.size(); ++i) {
            l.soft_scores.emplace_back(i < level.soft_labels.size() ? level.soft_labels[i] : "", b.soft_scores[i]);
        }
        for (std::size_t i = 0; i < b.violations.size(); ++i) {
            l.violations.emplace_back(i < level.hard_labels.size() ? level.hard_labels[i] : "", b.violations[i]);
        }
        l.evals_used = level.solution.evals_used;
        l.restart_index = level.solution.restart_index;
        out.levels.push_back(std::move(l));
    }
    std::function<void(const ObjectNode&, const std::optional<std::string>&, const Pose&)> visit =
        [&](const ObjectNode& node, const std::optional<std::string>& parent, const Pose& frame) {
            LayoutObject o;
            o.id = node.id;
            o.parent = parent;
            o.category = node.category;
            o.dims = node.extent;
            o.fixed = node.fixed;
            o.local_pose = node.local_pose;
            o.world_pose = compose_pose(frame, node.local_pose);
            const auto it = level_ok.find(parent);
            o.feasible = it == level_ok.end() || it->second;
            out.objects.push_back(o);
            for (const ObjectNode& child : node.children) {
                visit(child, node.id, o.world_pose);
            }
        };
    for (const ObjectNode& root : solution.tree.roots) {
        visit(root, std::nullopt, Pose::identity());
    }
    return out;
}

std::string layout_to_json(const LayoutFile& layout) {
    Json objects = Json::array();
    for (const LayoutObject& o : layout.objects) {
        objects.push_back(Json{{"id", o.id},
                               {"parent", o.parent ? Json(*o.parent) : Json(nullptr)},
                               {"category", o.category},
                               {"dims", dims_json(o.dims)},
                               {"fixed", o.fixed},
                               {"local_pose", pose_json(o.local_pose)},
                               {"world_pose", pose_json(o.world_pose)},
                               {"feasible", o.feasible}});
    }
    Json levels = Json::array();
    for (const LayoutLevel& l : layout.levels) {
        Json soft = Json::array();
        for (const auto& [label, v] : l.soft_scores) {
            soft.push_back(Json{{"term", label}, {"score", num(v)}});
        }
        Json hard = Json::array();
        for (const auto& [label, v] : l.violations) {
            hard.push_back(Json{{"term", label}, {"violation", num(v)}});
        }
        levels.push_back(Json{{"parent", l.parent ? Json(*l.parent) : Json(nullptr)},
                              {"feasible", l.feasible},
                              {"objective", num(l.objective)},
                              {"total_violation", num(l.total_violation)},
                              {"soft_scores", soft},
                              {"violations", hard},
                              {"evals_used", l.evals_used},
                              {"restart_index", l.restart_index}});
    }
    const Json doc{{"version", kLayoutVersion},
                   {"feasible", layout.feasible},
                   {"domain", domain_json(layout.domain)},
                   {"objects", objects},
                   {"levels", levels}};
    return doc.dump(2) + "\n";
}

LayoutFile parse_layout(std::string_view text) {
    const Json doc = parse_document(text);
    Fields f(doc, "");
    check_version(f, kLayoutVersion);
    LayoutFile out;
    out.feasible = get_bool(f.required("feasible"), f.at("feasible"));
    out.domain = parse_domain(f.required("domain"));
    const Json& objects = get_array(f.required("objects"), "/objects");
    for (std::size_t i = 0; i < objects.size(); ++i) {
        Fields o(objects[i], child_path("/objects", i));
        LayoutObject lo;
        lo.id = get_string(o.required("id"), o.at("id"));
        if (const Json& p = o.required("parent"); !p.is_null()) {
            lo.parent = get_string(p, o.at("parent"));
        }
        lo.category = get_string(o.required("category"), o.at("category"));
        lo.dims = parse_dims(o.required("dims"), o.at("dims"));
        lo.fixed = get_bool(o.required("fixed"), o.at("fixed"));
        lo.local_pose = parse_pose(o.required("local_pose"), o.at("local_pose"));
        lo.world_pose = parse_pose(o.required("world_pose"), o.at("world_pose"));
        lo.feasible = get_bool(o.required("feasible"), o.at("feasible"));
        o.finish();
        out.objects.push_back(std::move(lo));
    }
    const Json& levels = get_array(f.required("levels"), "/levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        Fields l(levels[i], child_path("/levels", i));
        LayoutLevel ll;
        if (const Json& p = l.required("parent"); !p.is_null()) {
            ll.parent = get_string(p, l.at("parent"));
        }
        ll.feasible = get_bool(l.required("feasible"), l.at("feasible"));
        ll.objective = get_number(l.required("objective"), l.at("objective"));
        ll.total_violation = get_number(l.required("total_violation"), l.at("total_violation"));
        const auto entries = [&](const char* key, const char* value_key) {
            std::vector<std::pair<std::string, double>> out_entries;
            const std::string path = l.at(key);
            for (const Json& e : get_array(l.required(key), path)) {
                Fields ef(e, child_path(path, out_entries.size()));
                std::string label = get_string(ef.required("term"), ef.at("term"));
                const double v = get_number(ef.required(value_key), ef.at(value_key));
                ef.finish();
                out_entries.emplace_back(std::move(label), v);
            }
            return out_entries;
        };
        ll.soft_scores = entries("soft_scores", "score");
        ll.violations = entries("violations", "violation");
        ll.evals_used = get_integer(l.required("evals_used"), l.at("evals_used"));
        ll.restart_index = static_cast<int>(get_integer(l.required("restart_index"), l.at("restart_index")));
        l.finish();
        out.levels.push_back(std::move(ll));
    }
    f.finish();
    return out;
}

// ---------------------------------------------------------------------------

Vec2 svg_page_point(const Domain& domain, Vec2 world) {
    const Aabb2 box = bounding_box(domain.boundary);
    return {kSvgMargin + kSvgPixelsPerMeter * (world.x - box.lo.x),
            kSvgMargin + kSvgPixelsPerMeter * (box.hi.y - world.y)};
}

std::string render_svg(const SceneTree& tree) {
    const Aabb2 box = bounding_box(tree.domain.boundary);
    const double width = 2.0 * kSvgMargin + kSvgPixelsPerMeter * (box.hi.x - box.lo.x);
    const double height = 2.0 * kSvgMargin + kSvgPixelsPerMeter * (box.hi.y - box.lo.y);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_number(width) << "\" height=\""
        << svg_number(height) << "\" viewBox=\"0 0 " << svg_number(width) << ' ' << svg_number(height) << "\">\n";
    out << "  <polygon class=\"domain\" points=\"" << svg_points(tree.domain, tree.domain.boundary)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";

    std::function<void(const ObjectNode&, const Pose&)> visit = [&](const ObjectNode& node, const Pose& frame) {
        const Pose world = compose_pose(frame, node.local_pose);
        const Vec2 c = svg_page_point(tree.domain, world.xy());
        out << "  <g class=\"object\" id=\"obj-" << escape_xml(node.id) << "\">\n";
        if (world.upright()) {
            const Quad q = world_footprint(world, node.extent);
            out << "    <polygon class=\"footprint\" points=\"" << svg_points(tree.domain, q)
                << "\" fill=\"none\" stroke=\"steelblue\"/>\n";
            const Vec3 f = object_front(world);
            const Vec2 edge{world.x() + f.x * node.extent.dy / 2.0, world.y() + f.y * node.extent.dy / 2.0};
            const Vec2 tip{edge.x + f.x * 0.15, edge.y + f.y * 0.15};
            const Vec2 a = svg_page_point(tree.domain, edge);
            const Vec2 b = svg_page_point(tree.domain, tip);
            out << "    <line class=\"front\" x1=\"" << svg_number(a.x) << "\" y1=\"" << svg_number(a.y) << "\" x2=\""
                << svg_number(b.x) << "\" y2=\"" << svg_number(b.y) << "\" stroke=\"crimson\"/>\n";
        }
        out << "    <text x=\"" << svg_number(c.x) << "\" y=\"" << svg_number(c.y)
            << "\" font-size=\"10\" text-anchor=\"middle\">" << escape_xml(node.id) << "</text>\n";
        out << "  </g>\n";
        for (const ObjectNode& child : node.children) {
            visit(child, world);
        }
    };
    for (const ObjectNode& root : tree.roots) {
        visit(root, Pose::identity());
    }
    out << "</svg>\n";
    return out.str();
}

// ---------------------------------------------------------------------------

TaskFile parse_task(std::string_view text) {
    const Json doc = parse_document(text);
    Fields f(doc, "");
    check_version(f, 1);
    TaskFile out;
    out.task.text = get_string(f.required("text"), f.at("text"));
    const Json& spec = get_array(f.required("spec"), "/spec");
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out.task.spec.push_back(parse_predicate(spec[i], child_path("/spec", i)));
    }
    Fields g(f.required("generator"), "/generator");
    const std::string kind = get_string(g.required("kind"), g.at("kind"));
    if (kind == "suggest") {
        out.generator = suggestion_generator(parse_program(g.required("start"), g.at("start")));
    } else if (kind == "enumerate") {
        Program base = parse_program(g.required("base"), g.at("base"));
        std::string parameter = get_string(g.required("parameter"), g.at("parameter"));
        std::vector<double> values;
        const std::string vpath = g.at("values");
        for (const Json& v : get_array(g.required("values"), vpath)) {
            values.push_back(get_number(v, child_path(vpath, values.size())));
        }
        if (values.empty()) {
            throw SpecError(vpath, "needs at least one value");
        }
        out.generator = enumerating_generator(std::move(base), std::move(parameter), std::move(values));
    } else {
        throw SpecError(g.at("kind"), "generator kind must be 'suggest' or 'enumerate'");
    }
    g.finish();
    f.finish();
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << contents;
    out.flush();
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
}

}  // namespace layoutforge
