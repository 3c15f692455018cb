#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "layoutforge/anneal.hpp"
#include "layoutforge/forge.hpp"
#include "layoutforge/io.hpp"
#include "layoutforge/oracle.hpp"
#include "layoutforge/relations.hpp"
#include "layoutforge/trajectory.hpp"

namespace py = pybind11;
using namespace layoutforge;

namespace {

struct SolveArgs {
    std::optional<std::uint64_t> seed;
    std::optional<long> max_evals;
    std::optional<int> restarts;
    bool full_6dof = false;
    std::optional<double> grid_step;
};

HierarchySolution solve_spec(const SceneSpec& spec, const SolveArgs& args) {
    const SceneTree tree = build_tree(spec);
    AnnealConfig config = spec.solver;
    config.seed = args.seed.value_or(spec.solver.seed);
    config.full_6dof = config.full_6dof || args.full_6dof;
    if (args.max_evals) {
        config.max_evals = *args.max_evals;
    }
    if (args.restarts) {
        config.restarts = *args.restarts;
    }
    if (args.grid_step) {
        GridSpec grid = config.snap.value_or(GridSpec{});
        grid.xy_step = *args.grid_step;
        config.snap = grid;
    }
    for (const std::string& p : config.problems()) {
        throw std::invalid_argument("solver configuration: " + p);
    }
    py::gil_scoped_release release;
    return solve_hierarchical(tree, group_terms_by_level(tree, spec.terms), config, spec.auto_rules);
}

std::string solve(const std::string& spec_text, std::optional<std::uint64_t> seed, std::optional<long> max_evals,
                  std::optional<int> restarts, bool full_6dof, std::optional<double> grid_step) {
    const SceneSpec spec = parse_spec(spec_text);
    return layout_to_json(make_layout_file(solve_spec(spec, {seed, max_evals, restarts, full_6dof, grid_step})));
}

std::string oracle(const std::string& spec_text, double grid_step) {
    const SceneSpec spec = parse_spec(spec_text);
    const SceneTree tree = build_tree(spec);
    GridSpec grid;
    grid.xy_step = grid_step;
    if (spec.solver.snap) {
        grid.yaw_set = spec.solver.snap->yaw_set;
        grid.max_objects = spec.solver.snap->max_objects;
    }
    const LevelSolver solver = [&](const LayoutProblem& problem, std::size_t) { return oracle_solve(problem, grid); };
    py::gil_scoped_release release;
    return layout_to_json(make_layout_file(solve_hierarchical(tree, group_terms_by_level(tree, spec.terms), solver, spec.auto_rules)));
}

std::string trajectory(const std::string& spec_text, std::size_t index, const std::optional<std::string>& layout_text,
                       double fps, std::optional<std::uint64_t> seed) {
    const SceneSpec spec = parse_spec(spec_text);
    if (index >= spec.trajectories.size()) {
        throw py::index_error("trajectory command " + std::to_string(index) + " out of range");
    }
    const SceneTree tree = layout_text ? parse_layout(*layout_text).tree() : solve_spec(spec, {seed, {}, {}, false, {}}).tree;
    const TrajectoryCommand& command = spec.trajectories[index];
    std::ostringstream track;
    if (const auto* subject = std::get_if<ObjectSubject>(&command.subject)) {
        export_track(track, plan_trajectory(command, tree), fps, TrackKind::Object, subject->id);
    } else {
        export_track(track, plan_trajectory(command, tree), fps, TrackKind::Camera, "");
    }
    return track.str();
}

py::dict program_dict(const Program& p) {
    py::dict d;
    d["category"] = p.category;
    d["params"] = p.params;
    return d;
}

// Runs the loop against a manual given as text; the returned manual text is
// unchanged unless a new record was committed.
py::dict forge_run(const std::string& task_text, const std::string& manual_text, int max_iters) {
    const TaskFile task = parse_task(task_text);
    std::istringstream in(manual_text);
    Manual manual = manual_text.empty() ? Manual{} : Manual::load(in);
    const LoopOutcome outcome = run_loop(task.task, task.generator, rule_critic, max_iters, manual);
    std::ostringstream saved;
    manual.save(saved);
    py::dict result;
    if (const auto* success = std::get_if<LoopSuccess>(&outcome)) {
        result["accepted"] = true;
        result["attempts"] = success->record.attempts;
        result["program"] = program_dict(success->record.program);
        result["newly_committed"] = success->newly_committed;
    } else {
        const auto& failure = std::get<LoopFailure>(outcome);
        result["accepted"] = false;
        result["attempts"] = failure.attempts;
        result["diagnostic"] = failure.diagnostic;
        py::list failures;
        if (failure.last_report) {
            for (const PredicateFailure& f : failure.last_report->failures) {
                failures.append(py::make_tuple(f.predicate, f.observed));
            }
        }
        result["failures"] = failures;
    }
    result["manual"] = saved.str();
    return result;
}

py::list forge_lookup(const std::string& manual_text, const std::string& query, std::size_t top_k, double min_score) {
    std::istringstream in(manual_text);
    const Manual manual = Manual::load(in);
    py::list hits;
    for (const ScoredRecord& hit : manual.lookup(query, top_k, min_score)) {
        py::dict d;
        d["score"] = hit.score;
        d["sequence"] = hit.record->sequence;
        d["task"] = hit.record->task_text;
        d["program"] = program_dict(hit.record->program);
        hits.append(d);
    }
    return hits;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Scene layout solver, trajectory planner and asset forge loop";

    py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);

    py::class_<Pose>(m, "Pose")
        .def(py::init<double, double, double, double, double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0,
             py::arg("z") = 0.0, py::arg("yaw") = 0.0, py::arg("pitch") = 0.0, py::arg("roll") = 0.0)
        .def_property_readonly("x", &Pose::x)
        .def_property_readonly("y", &Pose::y)
        .def_property_readonly("z", &Pose::z)
        .def_property_readonly("yaw", &Pose::yaw)
        .def_property_readonly("pitch", &Pose::pitch)
        .def_property_readonly("roll", &Pose::roll)
        .def("compose", &compose_pose, py::arg("child_local"))
        .def("__eq__", [](const Pose& a, const Pose& b) { return a == b; })
        .def("__repr__", [](const Pose& p) {
            std::ostringstream s;
            s << "Pose(" << p.x() << ", " << p.y() << ", " << p.z() << ", yaw=" << p.yaw() << ")";
            return s.str();
        });

    py::class_<Extent>(m, "Extent")
        .def(py::init([](double dx, double dy, double dz) { return Extent{dx, dy, dz}; }), py::arg("dx"), py::arg("dy"),
             py::arg("dz"))
        .def_readwrite("dx", &Extent::dx)
        .def_readwrite("dy", &Extent::dy)
        .def_readwrite("dz", &Extent::dz);

    py::class_<PlacedBox>(m, "Box")
        .def(py::init([](const Pose& pose, const Extent& extent) { return PlacedBox{pose, extent}; }), py::arg("pose"),
             py::arg("extent"))
        .def_readwrite("pose", &PlacedBox::pose)
        .def_readwrite("extent", &PlacedBox::extent);

    m.def("measure_distance", &measure_distance, py::arg("a"), py::arg("b"));
    m.def("measure_collision", &measure_collision, py::arg("a"), py::arg("b"));
    m.def("measure_proximity", &measure_proximity, py::arg("a"), py::arg("b"));
    m.def("metropolis_accept", &metropolis_accept, py::arg("delta"), py::arg("temperature"), py::arg("u"));

    m.def("normalize_spec", [](const std::string& text) { return serialize_spec(parse_spec(text)); }, py::arg("text"));
    m.def("solve", &solve, py::arg("spec"), py::arg("seed") = py::none(), py::arg("max_evals") = py::none(),
          py::arg("restarts") = py::none(), py::arg("full_6dof") = false, py::arg("grid_step") = py::none());
    m.def("oracle", &oracle, py::arg("spec"), py::arg("grid_step") = 0.25);
    m.def("render_svg", [](const std::string& layout) { return render_svg(parse_layout(layout).tree()); },
          py::arg("layout"));
    m.def("trajectory", &trajectory, py::arg("spec"), py::arg("command"), py::arg("layout") = py::none(),
          py::arg("fps") = 24.0, py::arg("seed") = py::none());
    m.def("forge_run", &forge_run, py::arg("task"), py::arg("manual") = "", py::arg("max_iters") = 8);
    m.def("forge_lookup", &forge_lookup, py::arg("manual"), py::arg("query"), py::arg("top_k") = 3,
          py::arg("min_score") = 0.2);
}
