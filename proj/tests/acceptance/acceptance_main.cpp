// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails. Instances are generated from fixed seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "../unit/test_support.hpp"
#include "layoutforge/cli.hpp"
#include "layoutforge/forge.hpp"
#include "layoutforge/io.hpp"
#include "layoutforge/oracle.hpp"
#include "layoutforge/random.hpp"
#include "layoutforge/trajectory.hpp"

using namespace layoutforge;
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "layoutforge-acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "layoutforge");
    std::vector<const char*> argv;
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code == kExitError) {
        std::fprintf(stderr, "cli error: %s\n", err.str().c_str());
    }
    return code;
}

Json box_object(const std::string& id, double dx, double dy, double dz) {
    return Json{{"id", id}, {"category", "box"}, {"dims", Json::array({dx, dy, dz})}};
}

Json rect_domain(double w, double d, double h) {
    return Json{{"boundary", Json::array({Json::array({0.0, 0.0}), Json::array({w, 0.0}), Json::array({w, d}),
                                          Json::array({0.0, d})})},
                {"height", h}};
}

// ---------------------------------------------------------------------------
// Independent re-validation (criterion 3)

using Poly = std::vector<Vec2>;

Poly corners(const LayoutObject& o) {
    const double c = std::cos(o.world_pose.yaw());
    const double s = std::sin(o.world_pose.yaw());
    const double hx = o.dims.dx / 2.0;
    const double hy = o.dims.dy / 2.0;
    Poly out;
    for (const auto& [lx, ly] : {std::pair{-hx, -hy}, std::pair{hx, -hy}, std::pair{hx, hy}, std::pair{-hx, hy}}) {
        out.push_back({o.world_pose.x() + c * lx - s * ly, o.world_pose.y() + s * lx + c * ly});
    }
    return out;
}

double shoelace(const Poly& p) {
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % p.size()];
        a += u.x * v.y - v.x * u.y;
    }
    return a / 2.0;
}

// Sutherland-Hodgman against a convex counterclockwise clip polygon.
Poly clip(Poly subject, const Poly& window) {
    for (std::size_t i = 0; i < window.size() && !subject.empty(); ++i) {
        const Vec2 a = window[i];
        const Vec2 b = window[(i + 1) % window.size()];
        const auto side = [&](Vec2 p) { return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x); };
        Poly next;
        for (std::size_t j = 0; j < subject.size(); ++j) {
            const Vec2 p = subject[j];
            const Vec2 q = subject[(j + 1) % subject.size()];
            const double sp = side(p);
            const double sq = side(q);
            if (sp >= 0) {
                next.push_back(p);
            }
            if ((sp >= 0) != (sq >= 0)) {
                const double t = sp / (sp - sq);
                next.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
            }
        }
        subject = std::move(next);
    }
    return subject;
}

struct Revalidation {
    double worst_collision = 0.0;
    double worst_containment = 0.0;
};

// Sibling footprint overlap area and how far any corner (or top face)
// leaves a rectangular room.
Revalidation revalidate(const LayoutFile& layout) {
    Revalidation r;
    const Aabb2 room = bounding_box(layout.domain.boundary);
    for (std::size_t i = 0; i < layout.objects.size(); ++i) {
        const LayoutObject& a = layout.objects[i];
        for (const Vec2& p : corners(a)) {
            const double out = std::max({0.0, room.lo.x - p.x, p.x - room.hi.x, room.lo.y - p.y, p.y - room.hi.y});
            r.worst_containment = std::max(r.worst_containment, out);
        }
        r.worst_containment = std::max(r.worst_containment, a.world_pose.z() + a.dims.dz / 2.0 - layout.domain.height);
        for (std::size_t j = i + 1; j < layout.objects.size(); ++j) {
            const LayoutObject& b = layout.objects[j];
            if (a.parent != b.parent) {
                continue;
            }
            const Poly inter = clip(corners(a), corners(b));
            r.worst_collision = std::max(r.worst_collision, inter.size() < 3 ? 0.0 : std::abs(shoelace(inter)));
        }
    }
    return r;
}

std::vector<LayoutFile> g_feasible_outputs;

void keep_if_feasible(const LayoutFile& layout) {
    if (layout.feasible) {
        g_feasible_outputs.push_back(layout);
    }
}

// ---------------------------------------------------------------------------
// Criterion 1

Json random_soft_term(Rng& rng) {
    const double weight = rng.uniform(0.5, 2.0);
    switch (rng.below(4)) {
    case 0:
        return Json{{"kind", "distance"}, {"participants", {"a", "b"}}, {"params", {{"target", rng.uniform(0.3, 4.0)}}},
                    {"weight", weight}};
    case 1:
        return Json{{"kind", "overlap"},
                    {"participants", {"a", "b"}},
                    {"params", {{"axis", rng.below(2) ? "x" : "y"}, {"target", rng.uniform(0.0, 0.6)}}},
                    {"weight", weight}};
    case 2:
        return Json{{"kind", "proximity"}, {"participants", {"a", "b"}}, {"weight", weight}};
    default:
        return Json{{"kind", "alignment"},
                    {"participants", {"a", "b"}},
                    {"params", {{"axis", rng.below(2) ? "x" : "y"}}},
                    {"weight", weight}};
    }
}

Json random_hard_term(Rng& rng) {
    if (rng.below(2) == 0) {
        return Json{{"kind", "proximity"}, {"participants", {"a", "b"}}, {"mode", "hard"},
                    {"comparator", "less_eq"}, {"threshold", rng.uniform(0.2, 1.5)}};
    }
    return Json{{"kind", "distance"}, {"participants", {"a", "b"}}, {"mode", "hard"},
                {"comparator", "greater_eq"}, {"threshold", rng.uniform(0.5, 3.0)}};
}

Verdict criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    int matched = 0;
    std::string misses;
    for (int k = 0; k < 25; ++k) {
        Rng rng = Rng::stream(2024, static_cast<std::uint64_t>(k), "acceptance-c1");
        Json spec{{"version", 1},
                  {"domain", rect_domain(10, 10, 3)},
                  {"objects",
                   Json::array({box_object("a", rng.uniform(0.5, 2.0), rng.uniform(0.4, 1.2), rng.uniform(0.4, 1.2)),
                                box_object("b", rng.uniform(0.5, 2.0), rng.uniform(0.4, 1.2), rng.uniform(0.4, 1.2))})},
                  {"terms", Json::array({random_soft_term(rng), random_hard_term(rng)})},
                  {"solver", {{"seed", k}}}};
        const fs::path dir = work_dir() / ("c1-" + std::to_string(k));
        fs::create_directories(dir);
        write_file((dir / "spec.json").string(), spec.dump(2));
        const int oc = cli({"oracle", (dir / "spec.json").string(), "--grid-step", "0.5", "--out", (dir / "oracle.json").string()});
        const int sc = cli({"solve", (dir / "spec.json").string(), "--snap-only", "--grid-step", "0.5", "--restarts", "5",
                            "--out", (dir / "solve.json").string()});
        if (oc == kExitError || sc == kExitError) {
            misses += " #" + std::to_string(k) + "(error)";
            continue;
        }
        const LayoutFile oracle = parse_layout(read_file((dir / "oracle.json").string()));
        const LayoutFile solved = parse_layout(read_file((dir / "solve.json").string()));
        keep_if_feasible(oracle);
        keep_if_feasible(solved);
        const double o = oracle.levels.at(0).objective;
        const double s = solved.levels.at(0).objective;
        if (oracle.feasible == solved.feasible && std::abs(o - s) <= 1e-9) {
            ++matched;
        } else {
            misses += " #" + std::to_string(k) + "(oracle " + fmt("%.12g", o) + " vs " + fmt("%.12g", s) + ")";
        }
    }
    const double secs = seconds_since(t0);
    return {matched >= 24 && secs < 60.0,
            std::to_string(matched) + "/25 within 1e-9 (need >= 24), " + fmt("%.1f", secs) + " s (limit 60 s)" +
                (misses.empty() ? "" : "; misses:" + misses)};
}

// ---------------------------------------------------------------------------
// Criterion 2

Verdict criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    int good = 0;
    std::string notes;
    for (int k = 0; k < 10; ++k) {
        Rng rng = Rng::stream(7, static_cast<std::uint64_t>(k), "acceptance-c2");
        const auto dims = [&](const std::string& id) {
            return box_object(id, rng.uniform(0.4, 0.9), rng.uniform(0.3, 0.6), rng.uniform(0.3, 1.0));
        };
        Json objects = Json::array({dims("a"), dims("b"), dims("c")});
        Json terms = Json::array(
            {Json{{"kind", "distance"}, {"participants", {"a", "b"}}, {"params", {{"target", rng.uniform(0.8, 2.0)}}}},
             Json{{"kind", "distance"}, {"participants", {"b", "c"}}, {"params", {{"target", rng.uniform(0.1, 0.6)}}},
                  {"weight", rng.uniform(0.5, 2.0)}},
             Json{{"kind", "alignment"}, {"participants", {"a", "c"}}, {"params", {{"axis", rng.below(2) ? "x" : "y"}}},
                  {"weight", rng.uniform(0.2, 1.0)}},
             Json{{"kind", "proximity"}, {"participants", {"a", "c"}}, {"mode", "hard"}, {"comparator", "less_eq"},
                  {"threshold", rng.uniform(0.6, 1.2)}}});
        Json spec{{"version", 1},
                  {"domain", rect_domain(2.5, 2.0, 2.5)},
                  {"objects", objects},
                  {"terms", terms},
                  {"solver", {{"seed", 100 + k}}}};
        const fs::path dir = work_dir() / ("c2-" + std::to_string(k));
        fs::create_directories(dir);
        write_file((dir / "spec.json").string(), spec.dump(2));
        const int oc = cli({"oracle", (dir / "spec.json").string(), "--grid-step", "0.25", "--out", (dir / "oracle.json").string()});
        const int sc = cli({"solve", (dir / "spec.json").string(), "--out", (dir / "solve.json").string()});
        if (oc == kExitError || sc == kExitError) {
            notes += " #" + std::to_string(k) + "(error)";
            continue;
        }
        const LayoutFile oracle = parse_layout(read_file((dir / "oracle.json").string()));
        const LayoutFile solved = parse_layout(read_file((dir / "solve.json").string()));
        keep_if_feasible(oracle);
        keep_if_feasible(solved);
        const double o = oracle.levels.at(0).objective;
        const double s = solved.levels.at(0).objective;
        const bool ok = solved.feasible && (!oracle.feasible || s <= 1.05 * o + 1e-9);
        good += ok ? 1 : 0;
        if (!ok) {
            notes += " #" + std::to_string(k) + "(oracle " + fmt("%.6g", o) + ", solver " + fmt("%.6g", s) +
                     (solved.feasible ? "" : " infeasible") + ")";
        }
    }
    const double secs = seconds_since(t0);
    return {good >= 9 && secs < 300.0,
            std::to_string(good) + "/10 feasible and <= 1.05 x oracle (need >= 9), " + fmt("%.1f", secs) +
                " s (limit 300 s)" + (notes.empty() ? "" : ";" + notes)};
}

// ---------------------------------------------------------------------------
// Criterion 3

Verdict criterion3() {
    double collision = 0.0;
    double containment = 0.0;
    for (const LayoutFile& layout : g_feasible_outputs) {
        const Revalidation r = revalidate(layout);
        collision = std::max(collision, r.worst_collision);
        containment = std::max(containment, r.worst_containment);
    }
    return {!g_feasible_outputs.empty() && collision <= 1e-6 && containment <= 1e-6,
            std::to_string(g_feasible_outputs.size()) + " feasible layouts; worst sibling overlap " +
                fmt("%.3g", collision) + " m^2, worst containment breach " + fmt("%.3g", containment) +
                " m (limits 1e-6)"};
}

// ---------------------------------------------------------------------------
// Criterion 4

Verdict criterion4() {
    const std::vector<std::pair<double, double>> pairs{{0.1, 1.0}, {0.5, 1.0}, {1.0, 1.0}, {2.0, 1.0}, {1.0, 0.5}};
    double worst = 0.0;
    std::string detail;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [d, t] = pairs[i];
        Rng rng = Rng::stream(99, i, "acceptance-c4");
        int accepted = 0;
        for (int k = 0; k < 10000; ++k) {
            accepted += metropolis_accept(d, t, rng.uniform()) ? 1 : 0;
        }
        const double rate = accepted / 10000.0;
        const double gap = std::abs(rate - std::exp(-d / t));
        worst = std::max(worst, gap);
        detail += " (d=" + fmt("%g", d) + ",T=" + fmt("%g", t) + "): " + fmt("%.4f", rate) + " vs " +
                  fmt("%.4f", std::exp(-d / t)) + ";";
    }
    return {worst <= 0.03, "max |rate - exp(-d/T)| = " + fmt("%.4f", worst) + " (limit 0.03);" + detail};
}

// ---------------------------------------------------------------------------
// Criterion 5

Verdict criterion5() {
    int monotone = 0;
    long records = 0;
    for (int k = 0; k < 20; ++k) {
        SceneTree tree;
        tree.domain = Domain::rectangle(4, 3, 2.5);
        Rng rng = Rng::stream(5, static_cast<std::uint64_t>(k), "acceptance-c5");
        for (const char* id : {"a", "b", "c"}) {
            tree.roots.push_back(ObjectNode{id, "box", Extent{rng.uniform(0.4, 1.0), rng.uniform(0.4, 1.0), 0.5}, Pose{}});
        }
        RelationTerm ab;
        ab.participants = {"a", "b"};
        ab.params.target = rng.uniform(0.2, 2.0);
        RelationTerm bc = ab;
        bc.participants = {"b", "c"};
        bc.params.target = rng.uniform(0.2, 2.0);
        const std::vector<RelationTerm> terms{ab, bc, proximity_constraint("a", "c", 0.5)};
        const LayoutProblem problem = assemble(validate_tree(tree).tree, std::nullopt, terms);
        AnnealConfig config;
        config.seed = static_cast<std::uint64_t>(k);
        config.max_evals = 20000;
        config.record_trace = true;
        const Solution s = anneal(problem, config);
        bool ok = !s.trace.empty();
        for (std::size_t i = 1; i < s.trace.size(); ++i) {
            const TraceRecord& prev = s.trace[i - 1];
            const TraceRecord& cur = s.trace[i];
            if (cur.restart == prev.restart && !(cur.best_augmented <= prev.best_augmented)) {
                ok = false;
            }
            if (!(cur.best_augmented <= cur.augmented)) {
                ok = false;
            }
        }
        records += static_cast<long>(s.trace.size());
        monotone += ok ? 1 : 0;
    }

    int identical = 0;
    const std::string spec = std::string(LAYOUTFORGE_TEST_DATA) + "/fixtures/living_room.json";
    for (int seed : {1, 2, 3}) {
        std::vector<std::string> bytes;
        for (int run = 0; run < 2; ++run) {
            const fs::path out = work_dir() / ("c5-" + std::to_string(seed) + "-" + std::to_string(run) + ".json");
            cli({"solve", spec, "--seed", std::to_string(seed), "--out", out.string()});
            bytes.push_back(read_file(out.string()));
        }
        identical += bytes[0] == bytes[1] && !bytes[0].empty() ? 1 : 0;
    }
    return {monotone == 20 && identical == 3,
            std::to_string(monotone) + "/20 traces non-increasing (" + std::to_string(records) + " records), " +
                std::to_string(identical) + "/3 repeated solves byte-identical"};
}

// ---------------------------------------------------------------------------
// Criterion 6

Verdict criterion6() {
    Rng rng = Rng::stream(6, 0, "acceptance-c6");
    const auto random_box = [&](double spread) {
        const Extent e{rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)};
        return PlacedBox{Pose(rng.uniform(-spread, spread), rng.uniform(-spread, spread), e.dz / 2.0 + rng.uniform(0.0, 0.5),
                              rng.uniform(0.0, 2.0 * kPi)),
                         e};
    };
    double worst_distance = 0.0;
    for (int k = 0; k < 100; ++k) {
        const PlacedBox a = random_box(2.0);
        const PlacedBox b = random_box(2.0);
        const double gap = std::abs(measure_distance(a, b) - lf_test::sampled_box_distance(a, b, 20000));
        worst_distance = std::max(worst_distance, gap);
    }

    int within = 0;
    double worst_sigma = 0.0;
    for (int k = 0; k < 100; ++k) {
        PlacedBox a = random_box(0.6);
        PlacedBox b = random_box(0.6);
        a.pose = a.pose.with_z(a.extent.dz / 2.0);
        b.pose = b.pose.with_z(b.extent.dz / 2.0);
        const Quad fa = world_footprint(a.pose, a.extent);
        const Quad fb = world_footprint(b.pose, b.extent);
        const AreaEstimate mc =
            mc_polygon_area(Polygon(fa.begin(), fa.end()), Polygon(fb.begin(), fb.end()), 100000, static_cast<std::uint64_t>(k));
        const double exact = measure_collision(a, b);
        const double sigmas = std::abs(exact - mc.area) / mc.standard_error;
        worst_sigma = std::max(worst_sigma, sigmas);
        within += sigmas <= 3.0 ? 1 : 0;
    }
    return {worst_distance <= 1e-2 && within == 100,
            "distance vs sampling oracle: worst gap " + fmt("%.2e", worst_distance) + " m (limit 1e-2) on 100 pairs; " +
                "collision vs Monte-Carlo: " + std::to_string(within) + "/100 within 3 sigma (worst " +
                fmt("%.2f", worst_sigma) + " sigma)"};
}

// ---------------------------------------------------------------------------
// Criterion 7

Verdict criterion7() {
    SceneTree tree;
    tree.domain = Domain::rectangle(6, 5, 3);
    ObjectNode table{"table", "table", Extent{1.4, 0.9, 0.75}, Pose{}, false, {}};
    table.children.push_back(ObjectNode{"plate1", "plate", Extent{0.25, 0.25, 0.03}, Pose{}, false, {}});
    table.children.push_back(ObjectNode{"plate2", "plate", Extent{0.25, 0.25, 0.03}, Pose{}, false, {}});
    ObjectNode shelf{"shelf", "shelf", Extent{1.2, 0.4, 1.8}, Pose(5.2, 2.5, 0.0, kPi / 2.0), true, {}};
    for (int i = 1; i <= 4; ++i) {
        shelf.children.push_back(
            ObjectNode{"book" + std::to_string(i), "book", Extent{0.16, 0.24, 0.05}, Pose{}, false, {}});
    }
    tree.roots = {table, shelf};
    const ValidationReport report = validate_tree(tree);
    if (!report.ok()) {
        return {false, "fixture does not validate: " + report.diagnostics.front().message};
    }
    RelationTerm plates;
    plates.participants = {"plate1", "plate2"};
    plates.params.target = 0.5;
    RelationTerm row;
    row.kind = RelationKind::Alignment;
    row.participants = {"book1", "book2", "book3", "book4"};
    row.params.axis = Axis::Y;
    RelationTerm near;
    near.participants = {"table", "shelf"};
    near.params.target = 1.0;
    const std::vector<RelationTerm> terms{plates, row, near};

    AnnealConfig config;
    config.seed = 7;
    config.max_evals = 40000;
    const HierarchySolution solution =
        solve_hierarchical(report.tree, group_terms_by_level(report.tree, terms), config, AutoRules{});

    const LayoutFile file = make_layout_file(solution);
    std::map<std::string, const LayoutObject*> by_id;
    for (const LayoutObject& o : file.objects) {
        by_id[o.id] = &o;
    }
    double worst_outside = 0.0;
    double worst_compose = 0.0;
    for (const LayoutObject& o : file.objects) {
        lf_test::M4 expect = lf_test::to_matrix(o.local_pose);
        for (std::optional<std::string> p = o.parent; p; p = by_id.at(*p)->parent) {
            expect = lf_test::multiply(lf_test::to_matrix(by_id.at(*p)->local_pose), expect);
        }
        worst_compose = std::max(worst_compose, lf_test::max_abs_diff(expect, lf_test::to_matrix(o.world_pose)));
        if (o.parent) {
            const Poly parent_top = corners(*by_id.at(*o.parent));
            for (const Vec2& c : corners(o)) {
                double outside = 0.0;
                for (std::size_t i = 0; i < parent_top.size(); ++i) {
                    const Vec2 a = parent_top[i];
                    const Vec2 b = parent_top[(i + 1) % parent_top.size()];
                    const double len = std::hypot(b.x - a.x, b.y - a.y);
                    outside = std::max(outside, -((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)) / len);
                }
                worst_outside = std::max(worst_outside, outside);
            }
            const double bottom = o.world_pose.z() - o.dims.dz / 2.0;
            const double parent_top_z = by_id.at(*o.parent)->world_pose.z() + by_id.at(*o.parent)->dims.dz / 2.0;
            worst_compose = std::max(worst_compose, std::abs(bottom - parent_top_z));
        }
    }
    return {solution.feasible() && worst_outside <= 1e-6 && worst_compose <= 1e-9,
            std::string(solution.feasible() ? "all levels feasible" : "INFEASIBLE level") + ", " +
                std::to_string(solution.levels.size()) + " levels solved; child footprint outside parent top by at most " +
                fmt("%.2e", worst_outside) + " m (limit 1e-6); composition error " + fmt("%.2e", worst_compose) +
                " (limit 1e-9)"};
}

// ---------------------------------------------------------------------------
// Criterion 8

Verdict criterion8() {
    std::string detail;
    bool ok = true;

    // Pan: origin (0,2,0.5) facing -y, so right = facing x up = (-1,0,0)
    AnchorFrame pan_frame{{0, 2, 0.5}, {0, -1, 0}, {0, 0, 0.5}, {-1, 0, 0}, 2.0};
    TrajectoryCommand pan;
    pan.kind = TrajectoryTemplate::Pan;
    pan.frames = 3;
    pan.span = 2.0;
    pan.anchor.object = "tv";
    const auto pan_keys = build_trajectory(pan, pan_frame);
    const std::vector<Vec3> pan_expect{{1, 2, 0.5}, {0, 2, 0.5}, {-1, 2, 0.5}};
    bool pan_ok = pan_keys.size() == 3;
    for (std::size_t i = 0; pan_ok && i < 3; ++i) {
        pan_ok = pan_keys[i].position == pan_expect[i] && pan_keys[i].look_at == pan_frame.center;
    }
    ok = ok && pan_ok;
    detail += std::string("pan ") + (pan_ok ? "exact" : "MISMATCH");

    // Orbit 2*pi, 4 frames: compass points at radius d around the center
    AnchorFrame orbit_frame{{1, 1, 0.4}, {0, 1, 0}, {1, 1, 0.4}, {1, 0, 0}, 2.0};
    TrajectoryCommand orbit;
    orbit.kind = TrajectoryTemplate::Orbit;
    orbit.frames = 4;
    orbit.arc = 2.0 * kPi;
    orbit.anchor = Anchor{"table", AnchorRelation::Around, 2.0};
    const auto orbit_keys = build_trajectory(orbit, orbit_frame);
    const std::vector<Vec3> orbit_expect{{1, 3, 0.4}, {-1, 1, 0.4}, {1, -1, 0.4}, {3, 1, 0.4}};
    bool orbit_ok = orbit_keys.size() == 4;
    for (std::size_t i = 0; orbit_ok && i < 4; ++i) {
        orbit_ok = orbit_keys[i].position == orbit_expect[i] && orbit_keys[i].look_at == orbit_frame.center;
    }
    ok = ok && orbit_ok;
    detail += std::string(", orbit ") + (orbit_ok ? "exact" : "MISMATCH");

    // rigid-motion equivariance under random anchor transforms
    double worst = 0.0;
    const Extent extent{1.0, 0.6, 0.8};
    const Pose base(1.0, -0.5, 0.4, 0.3);
    const std::vector<std::pair<TrajectoryTemplate, AnchorRelation>> kinds{
        {TrajectoryTemplate::Pan, AnchorRelation::InFrontOf},   {TrajectoryTemplate::Orbit, AnchorRelation::Around},
        {TrajectoryTemplate::Dolly, AnchorRelation::LeftOf},    {TrajectoryTemplate::Crane, AnchorRelation::Behind},
        {TrajectoryTemplate::Static, AnchorRelation::RightOf},  {TrajectoryTemplate::Orbit, AnchorRelation::InFrontOf},
        {TrajectoryTemplate::Pan, AnchorRelation::Above},
    };
    Rng rng = Rng::stream(8, 0, "acceptance-c8");
    for (int k = 0; k < 20; ++k) {
        const double dx = rng.uniform(-5, 5);
        const double dy = rng.uniform(-5, 5);
        const double theta = rng.uniform(0, 2 * kPi);
        const Pose motion(dx, dy, 0.0, theta);
        const Pose moved = compose_pose(motion, base);
        for (const auto& [kind, relation] : kinds) {
            TrajectoryCommand c;
            c.kind = kind;
            c.frames = 6;
            c.arc = 1.5;
            c.anchor = Anchor{"box", relation, std::nullopt};
            const auto a = build_trajectory(c, anchor_frame(base, extent, relation, std::nullopt));
            const auto b = build_trajectory(c, anchor_frame(moved, extent, relation, std::nullopt));
            const double cs = std::cos(theta);
            const double sn = std::sin(theta);
            const auto apply = [&](Vec3 p) { return Vec3{dx + cs * p.x - sn * p.y, dy + sn * p.x + cs * p.y, p.z}; };
            for (std::size_t i = 0; i < a.size(); ++i) {
                worst = std::max(worst, norm(apply(a[i].position) - b[i].position));
                worst = std::max(worst, norm(apply(a[i].look_at) - b[i].look_at));
            }
        }
    }
    ok = ok && worst <= 1e-9;
    detail += ", equivariance error " + fmt("%.2e", worst) + " over 20 transforms (limit 1e-9)";

    // golden keyframe files
    const std::string data = LAYOUTFORGE_TEST_DATA;
    int golden_ok = 0;
    const std::vector<std::pair<std::string, std::string>> goldens{{"0", "orbit_track.txt"}, {"1", "pan_track.txt"}};
    for (const auto& [index, name] : goldens) {
        const fs::path out = work_dir() / ("c8-" + name);
        cli({"traj", data + "/fixtures/orbit_scene.json", "--command", index, "--fps", "24", "--out", out.string()});
        golden_ok += read_file(out.string()) == read_file(data + "/golden/" + name) ? 1 : 0;
    }
    ok = ok && golden_ok == 2;
    detail += ", " + std::to_string(golden_ok) + "/2 golden tracks byte-exact";
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// Criterion 9

Program five_leg_table_base() {
    return Program{"table",
                   {{"top_dx", 1.2}, {"top_dy", 0.8}, {"top_dz", 0.04}, {"leg_count", 4}, {"leg_radius", 0.03}, {"height", 0.75}}};
}

Verdict criterion9() {
    std::string detail;
    Manual manual;

    // forced attempt count: the accepting value is third in the enumeration
    const Task five{"a five legged table", {Predicate{"leg_count", PredicateOp::Equals, 5.0, "", 0, 0}}};
    int calls = 0;
    const Generator counted = [&, inner = enumerating_generator(five_leg_table_base(), "leg_count", {3, 4, 5, 6})](
                                  const GeneratorContext& ctx) {
        ++calls;
        return inner(ctx);
    };
    const LoopOutcome first = run_loop(five, counted, rule_critic, 6, manual);
    const auto* success = std::get_if<LoopSuccess>(&first);
    const bool forced_ok = success != nullptr && success->record.attempts == 3 && calls == 3 && manual.size() == 1;
    detail += std::string("enumerating fixture ") + (forced_ok ? "accepted at attempt 3" : "WRONG");

    // a table and a suggestion-driven lamp, for more records to replay
    const Task tall{"a tall table", {Predicate{"height", PredicateOp::InRange, 0, "", 0.95, 1.05}}};
    run_loop(tall, suggestion_generator(five_leg_table_base()), rule_critic, 8, manual);
    const Task lamp{"a lamp with a tall pole", {Predicate{"category", PredicateOp::Equals, 0, "lamp", 0, 0},
                                                 Predicate{"pole_height", PredicateOp::InRange, 0, "", 1.4, 1.6}}};
    run_loop(lamp, suggestion_generator(five_leg_table_base()), rule_critic, 8, manual);

    // unsatisfiable: exactly max_iters attempts, manual unchanged
    const Manual before = manual;
    const Task impossible{"a table that is a lamp", {Predicate{"category", PredicateOp::Equals, 0, "lamp", 0, 0},
                                                      Predicate{"leg_count", PredicateOp::Equals, 4, "", 0, 0}}};
    int impossible_calls = 0;
    const Generator stuck = [&](const GeneratorContext&) {
        ++impossible_calls;
        return five_leg_table_base();
    };
    const LoopOutcome failed = run_loop(impossible, stuck, rule_critic, 5, manual);
    const auto* failure = std::get_if<LoopFailure>(&failed);
    const bool fail_ok = failure != nullptr && failure->attempts == 5 && impossible_calls == 5 && manual == before;
    detail += std::string(", unsatisfiable fixture ") + (fail_ok ? "failed after exactly 5 attempts, manual unchanged" : "WRONG");

    // replay every committed record against its own task
    const std::map<std::string, const Task*> tasks{{five.text, &five}, {tall.text, &tall}, {lamp.text, &lamp}};
    int replayed = 0;
    for (const ManualRecord& r : manual.records()) {
        const auto it = tasks.find(r.task_text);
        if (it != tasks.end() && rule_critic(*it->second, toy_execute(r.program), r.program).accepted) {
            ++replayed;
        }
    }
    const bool replay_ok = replayed == static_cast<int>(manual.size()) && manual.size() == 3;
    detail += ", " + std::to_string(replayed) + "/" + std::to_string(manual.size()) + " records re-accepted";

    // load/save/load
    std::ostringstream first_save;
    manual.save(first_save);
    std::istringstream in(first_save.str());
    const Manual loaded = Manual::load(in);
    std::ostringstream second_save;
    loaded.save(second_save);
    std::istringstream in2(second_save.str());
    const Manual reloaded = Manual::load(in2);
    const bool round_ok = loaded == manual && reloaded == manual && first_save.str() == second_save.str();
    detail += std::string(", manual round-trip ") + (round_ok ? "bit-exact" : "DIFFERS");
    return {forced_ok && fail_ok && replay_ok && round_ok, detail};
}

// ---------------------------------------------------------------------------
// Criterion 10

LayoutProblem invariance_problem(const Domain& domain, double weight_scale, const Pose& shelf_pose) {
    SceneTree tree;
    tree.domain = domain;
    tree.roots.push_back(ObjectNode{"a", "chair", Extent{0.5, 0.5, 0.9}, Pose{}, false, {}});
    tree.roots.push_back(ObjectNode{"b", "chair", Extent{0.5, 0.5, 0.9}, Pose{}, false, {}});
    tree.roots.push_back(ObjectNode{"t", "table", Extent{1.2, 0.8, 0.75}, Pose{}, false, {}});
    tree.roots.push_back(ObjectNode{"s", "shelf", Extent{1.0, 0.4, 1.8}, shelf_pose, true, {}});
    RelationTerm at;
    at.participants = {"a", "t"};
    at.params.target = 0.3;
    at.mode = Soft{1.0 * weight_scale};
    RelationTerm bt = at;
    bt.participants = {"b", "t"};
    bt.mode = Soft{0.7 * weight_scale};
    RelationTerm facing;
    facing.kind = RelationKind::RelativeOrientation;
    facing.participants = {"a", "b"};
    facing.params.target = kPi;
    facing.mode = Soft{0.5 * weight_scale};
    RelationTerm sym;
    sym.kind = RelationKind::Symmetry;
    sym.participants = {"a", "b"};
    sym.params.symmetry = Reflection{{0.0, 0.0}, {1.0, 0.0}};
    sym.params.pairs = {{0, 1}};
    sym.mode = Soft{2.0 * weight_scale};
    RelationTerm wall;
    wall.participants = {"t", "s"};
    wall.params.target = 1.0;
    wall.mode = Soft{0.4 * weight_scale};
    return assemble(validate_tree(tree).tree, std::nullopt,
                    std::vector<RelationTerm>{at, bt, facing, sym, wall, proximity_constraint("a", "t", 0.4)});
}

Pose mirror_x(const Pose& p) { return Pose(-p.x(), p.y(), p.z(), -p.yaw(), -p.pitch(), p.roll()); }

Verdict criterion10() {
    std::string detail;
    const Domain room = Domain::centered_rectangle(6, 5, 3);
    const Pose shelf(1.8, 2.2, 0.0, kPi);

    // weight scaling: same argmin and rank order over 100 random candidates
    const LayoutProblem base = invariance_problem(room, 1.0, shelf);
    const LayoutProblem scaled = invariance_problem(room, 3.7, shelf);
    Rng rng = Rng::stream(10, 0, "acceptance-c10");
    std::vector<Layout> candidates;
    for (int k = 0; k < 100; ++k) {
        Rng init = Rng::stream(10, static_cast<std::uint64_t>(k) + 1, "acceptance-c10-init");
        candidates.push_back(init_layout(base, init));
    }
    std::vector<double> la;
    std::vector<double> lb;
    for (const Layout& c : candidates) {
        la.push_back(evaluate(base, c).objective);
        lb.push_back(evaluate(scaled, c).objective);
    }
    const auto argmin = [](const std::vector<double>& v) { return std::min_element(v.begin(), v.end()) - v.begin(); };
    bool ranks_ok = argmin(la) == argmin(lb);
    for (std::size_t i = 0; i < la.size(); ++i) {
        for (std::size_t j = 0; j < la.size(); ++j) {
            if ((la[i] < la[j]) != (lb[i] < lb[j]) && std::abs(la[i] - la[j]) > 1e-12) {
                ranks_ok = false;
            }
        }
    }
    detail += std::string("weight scaling ") + (ranks_ok ? "keeps argmin and ranking" : "CHANGES RANKING");

    // rigid motion invariance of every measure
    double worst_rigid = 0.0;
    for (int k = 0; k < 50; ++k) {
        const auto box = [&] {
            const Extent e{rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5)};
            return PlacedBox{Pose(rng.uniform(-2, 2), rng.uniform(-2, 2), e.dz / 2.0, rng.uniform(0, 2 * kPi)), e};
        };
        const std::vector<PlacedBox> boxes{box(), box(), box(), box()};
        const Pose motion(rng.uniform(-10, 10), rng.uniform(-10, 10), 0.0, rng.uniform(0, 2 * kPi));
        std::vector<PlacedBox> moved;
        for (const PlacedBox& b : boxes) {
            moved.push_back({compose_pose(motion, b.pose), b.extent});
        }
        const auto move_point = [&](Vec2 p) {
            const Vec3 w = compose_pose(motion, Pose(p.x, p.y, 0.0)).position();
            return Vec2{w.x, w.y};
        };
        const auto rotate_dir = [&](Vec2 v) {
            return Vec2{std::cos(motion.yaw()) * v.x - std::sin(motion.yaw()) * v.y,
                        std::sin(motion.yaw()) * v.x + std::cos(motion.yaw()) * v.y};
        };
        Domain big = Domain::centered_rectangle(8, 8, 3);
        Domain big_moved = big;
        for (Vec2& p : big_moved.boundary) {
            p = move_point(p);
        }
        const double target = rng.uniform(0, 2 * kPi);
        const Reflection plane{{rng.uniform(-1, 1), rng.uniform(-1, 1)}, {0.6, 0.8}};
        const Reflection plane_moved{move_point(plane.point), rotate_dir(plane.normal)};
        const Rotational spin{{rng.uniform(-1, 1), rng.uniform(-1, 1)}, 4};
        const Rotational spin_moved{move_point(spin.center), 4};
        const std::vector<std::string> cats{"x", "x", "x", "x"};
        const Pairing pairs{{0, 1}, {2, 3}};
        const std::vector<std::pair<double, double>> values{
            {measure_distance(boxes[0], boxes[1]), measure_distance(moved[0], moved[1])},
            {measure_rel_orientation(boxes[0], boxes[1], target), measure_rel_orientation(moved[0], moved[1], target)},
            {measure_proximity(boxes[0], boxes[2]), measure_proximity(moved[0], moved[2])},
            {measure_collision(boxes[1], boxes[2]), measure_collision(moved[1], moved[2])},
            {measure_containment(boxes[3], big), measure_containment(moved[3], big_moved)},
            {measure_symmetry(boxes, cats, plane, pairs, 20.0), measure_symmetry(moved, cats, plane_moved, pairs, 20.0)},
            {measure_symmetry(boxes, cats, spin, pairs, 20.0), measure_symmetry(moved, cats, spin_moved, pairs, 20.0)},
        };
        for (const auto& [before, after] : values) {
            worst_rigid = std::max(worst_rigid, std::abs(before - after));
        }
        // alignment and overlap are axis-relative: invariant under translations
        // and quarter turns that map the axis onto itself
        const Pose shift(rng.uniform(-10, 10), rng.uniform(-10, 10), 0.0, 0.0);
        std::vector<PlacedBox> shifted;
        for (const PlacedBox& b : boxes) {
            shifted.push_back({compose_pose(shift, b.pose), b.extent});
        }
        for (const Axis axis : {Axis::X, Axis::Y}) {
            worst_rigid = std::max(worst_rigid, std::abs(measure_alignment(boxes, axis) - measure_alignment(shifted, axis)));
            worst_rigid = std::max(worst_rigid, std::abs(measure_overlap(boxes[0], boxes[1], axis) -
                                                         measure_overlap(shifted[0], shifted[1], axis)));
        }
        const Pose half_turn(0.0, 0.0, 0.0, kPi);
        std::vector<PlacedBox> turned;
        for (const PlacedBox& b : boxes) {
            turned.push_back({compose_pose(half_turn, b.pose), b.extent});
        }
        worst_rigid = std::max(worst_rigid, std::abs(measure_alignment(boxes, Axis::X) - measure_alignment(turned, Axis::X)));
        worst_rigid = std::max(worst_rigid, std::abs(measure_overlap(boxes[0], boxes[1], Axis::Y) -
                                                     measure_overlap(turned[0], turned[1], Axis::Y)));
    }
    detail += ", rigid-motion error " + fmt("%.2e", worst_rigid) + " (limit 1e-9)";

    // mirror consistency: reflect the problem across x = 0 and evaluate the
    // mirrored final layout of the original run
    AnnealConfig config;
    config.seed = 10;
    config.max_evals = 30000;
    double worst_mirror = 0.0;
    for (int k = 0; k < 3; ++k) {
        config.seed = 10 + static_cast<std::uint64_t>(k);
        const Solution s = anneal(base, config);
        Domain mirrored_room = room;
        for (Vec2& p : mirrored_room.boundary) {
            p.x = -p.x;
        }
        std::reverse(mirrored_room.boundary.begin(), mirrored_room.boundary.end());
        const LayoutProblem mirrored = invariance_problem(mirrored_room, 1.0, mirror_x(shelf));
        std::vector<Pose> poses;
        for (const Pose& p : s.layout.poses()) {
            poses.push_back(mirror_x(p));
        }
        const Breakdown original = evaluate(base, s.layout);
        const Breakdown reflected = evaluate(mirrored, Layout(s.layout.ids(), poses));
        worst_mirror = std::max(worst_mirror, std::abs(original.objective - reflected.objective));
        worst_mirror = std::max(worst_mirror, std::abs(original.total_violation - reflected.total_violation));
    }
    detail += ", mirror objective error " + fmt("%.2e", worst_mirror) + " (limit 1e-9)";
    return {ranks_ok && worst_rigid <= 1e-9 && worst_mirror <= 1e-9, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"1 oracle equivalence", criterion1},         {"2 annealing quality", criterion2},
        {"3 feasibility re-validation", criterion3},  {"4 metropolis statistics", criterion4},
        {"5 monotonicity and determinism", criterion5}, {"6 relation-measure oracles", criterion6},
        {"7 hierarchy", criterion7},                  {"8 trajectory", criterion8},
        {"9 forge loop", criterion9},                 {"10 invariance suite", criterion10},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::printf("[%s] criterion %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
