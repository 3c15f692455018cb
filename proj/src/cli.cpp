#include "layoutforge/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "layoutforge/format.hpp"
#include "layoutforge/io.hpp"
#include "layoutforge/oracle.hpp"

namespace layoutforge {

namespace {

struct SolveOptions {
    std::string spec;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string svg;
    bool full_6dof = false;
    std::optional<long> max_evals;
    std::string trace;
    bool snap_only = false;
    double grid_step = 0.25;
    std::optional<int> restarts;
};

struct OracleOptions {
    std::string spec;
    double grid_step = 0.25;
    std::string out;
    std::string svg;
};

struct TrajOptions {
    std::string spec;
    std::size_t command = 0;
    double fps = 24.0;
    std::string out;
    std::string layout;
    std::optional<std::uint64_t> seed;
};

struct ForgeRunOptions {
    std::string task;
    std::string manual;
    int max_iters = 8;
};

struct ForgeLookupOptions {
    std::string manual;
    std::string query;
    std::size_t top_k = 3;
    double min_score = 0.2;
};

// flag > LAYOUTFORGE_SEED > the spec's own seed (0 unless set)
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t spec_seed) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("LAYOUTFORGE_SEED"); env != nullptr && *env != '\0') {
        std::uint64_t v = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, v);
        if (ec != std::errc{} || ptr != end) {
            throw std::invalid_argument(std::string("LAYOUTFORGE_SEED is not an unsigned integer: ") + env);
        }
        return v;
    }
    return spec_seed;
}

std::string program_text(const Program& p) {
    std::string out = p.category;
    bool first = true;
    for (const auto& [name, value] : p.params) {
        out += first ? " " : ",";
        out += name + "=" + format_double(value);
        first = false;
    }
    return out;
}

void report_levels(std::ostream& out, const HierarchySolution& solution) {
    for (const LevelReport& level : solution.levels) {
        out << "level " << level.parent.value_or("<root>") << ": objective " << format_double(level.solution.breakdown.objective)
            << ", violation " << format_double(level.solution.breakdown.total_violation)
            << (level.feasible ? ", feasible" : ", infeasible") << '\n';
    }
}

void write_outputs(const HierarchySolution& solution, const std::string& layout_path, const std::string& svg_path,
                   std::ostream& out) {
    const std::string layout = layout_to_json(make_layout_file(solution));
    if (layout_path.empty()) {
        out << layout;
    } else {
        write_file(layout_path, layout);
    }
    if (!svg_path.empty()) {
        write_file(svg_path, render_svg(solution.tree));
    }
}

AnnealConfig solve_config(const SceneSpec& spec, const SolveOptions& o) {
    AnnealConfig config = spec.solver;
    config.seed = resolve_seed(o.seed, spec.solver.seed);
    config.full_6dof = config.full_6dof || o.full_6dof;
    if (o.max_evals) {
        config.max_evals = *o.max_evals;
    }
    if (o.restarts) {
        config.restarts = *o.restarts;
    }
    if (o.snap_only) {
        GridSpec grid = config.snap.value_or(GridSpec{});
        grid.xy_step = o.grid_step;
        config.snap = grid;
    }
    config.record_trace = !o.trace.empty();
    for (const std::string& p : config.problems()) {
        throw std::invalid_argument("solver configuration: " + p);
    }
    return config;
}

int run_solve(const SolveOptions& o, std::ostream& out) {
    const SceneSpec spec = parse_spec(read_file(o.spec));
    const SceneTree tree = build_tree(spec);
    const AnnealConfig config = solve_config(spec, o);
    const HierarchySolution solution = solve_hierarchical(tree, group_terms_by_level(tree, spec.terms), config, spec.auto_rules);
    write_outputs(solution, o.out, o.svg, out);
    if (!o.trace.empty()) {
        std::ostringstream trace;
        for (const LevelReport& level : solution.levels) {
            write_trace(trace, level.solution.trace);
        }
        write_file(o.trace, trace.str());
    }
    if (!o.out.empty()) {
        report_levels(out, solution);
    }
    return solution.feasible() ? kExitOk : kExitInfeasible;
}

int run_oracle(const OracleOptions& o, std::ostream& out) {
    const SceneSpec spec = parse_spec(read_file(o.spec));
    const SceneTree tree = build_tree(spec);
    GridSpec grid;
    grid.xy_step = o.grid_step;
    if (spec.solver.snap) {
        grid.yaw_set = spec.solver.snap->yaw_set;
        grid.max_objects = spec.solver.snap->max_objects;
    }
    const LevelSolver solver = [&](const LayoutProblem& problem, std::size_t) { return oracle_solve(problem, grid); };
    const HierarchySolution solution = solve_hierarchical(tree, group_terms_by_level(tree, spec.terms), solver, spec.auto_rules);
    write_outputs(solution, o.out, o.svg, out);
    if (!o.out.empty()) {
        report_levels(out, solution);
    }
    return solution.feasible() ? kExitOk : kExitInfeasible;
}

int run_traj(const TrajOptions& o, std::ostream& out) {
    const SceneSpec spec = parse_spec(read_file(o.spec));
    if (o.command >= spec.trajectories.size()) {
        throw std::invalid_argument("trajectory command " + std::to_string(o.command) + " out of range (spec has " +
                                    std::to_string(spec.trajectories.size()) + ")");
    }
    const TrajectoryCommand& command = spec.trajectories[o.command];
    SceneTree tree;
    if (!o.layout.empty()) {
        tree = parse_layout(read_file(o.layout)).tree();
    } else {
        const SceneTree initial = build_tree(spec);
        AnnealConfig config = spec.solver;
        config.seed = resolve_seed(o.seed, spec.solver.seed);
        tree = solve_hierarchical(initial, group_terms_by_level(initial, spec.terms), config, spec.auto_rules).tree;
    }
    const std::vector<Keyframe> keys = plan_trajectory(command, tree);
    std::ostringstream track;
    if (const auto* subject = std::get_if<ObjectSubject>(&command.subject)) {
        export_track(track, keys, o.fps, TrackKind::Object, subject->id);
    } else {
        export_track(track, keys, o.fps, TrackKind::Camera, "");
    }
    if (o.out.empty()) {
        out << track.str();
    } else {
        write_file(o.out, track.str());
    }
    return kExitOk;
}

Manual load_manual(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        return {};
    }
    std::istringstream in(read_file(path));
    return Manual::load(in);
}

int run_forge(const ForgeRunOptions& o, std::ostream& out, std::ostream& err) {
    const TaskFile task = parse_task(read_file(o.task));
    Manual manual = load_manual(o.manual);
    const LoopOutcome outcome = run_loop(task.task, task.generator, rule_critic, o.max_iters, manual);
    if (const auto* success = std::get_if<LoopSuccess>(&outcome)) {
        if (success->newly_committed) {
            std::ostringstream saved;
            manual.save(saved);
            write_file(o.manual, saved.str());
        }
        out << "accepted after " << success->record.attempts << " attempt(s): " << program_text(success->record.program)
            << (success->newly_committed ? "" : " (already in manual)") << '\n';
        return kExitOk;
    }
    const LoopFailure& failure = std::get<LoopFailure>(outcome);
    err << "not accepted after " << failure.attempts << " attempt(s): " << failure.diagnostic << '\n';
    if (failure.last_report) {
        for (const PredicateFailure& f : failure.last_report->failures) {
            err << "  " << f.predicate << " (observed " << f.observed << ")\n";
        }
    }
    return kExitInfeasible;
}

int run_lookup(const ForgeLookupOptions& o, std::ostream& out) {
    std::istringstream in(read_file(o.manual));
    const Manual manual = Manual::load(in);
    for (const ScoredRecord& hit : manual.lookup(o.query, o.top_k, o.min_score)) {
        out << format_fixed(hit.score, 6) << '\t' << hit.record->sequence << '\t' << hit.record->task_text << '\t'
            << program_text(hit.record->program) << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Constraint-based scene layout, camera trajectories and a toy asset forge", "layoutforge"};
    app.require_subcommand(1);

    SolveOptions solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Anneal every level of a scene spec");
    solve_cmd->add_option("spec", solve.spec, "Scene spec (JSON)")->required();
    solve_cmd->add_option("--seed", solve.seed, "RNG seed (default: $LAYOUTFORGE_SEED, then the spec's seed)");
    solve_cmd->add_option("--out", solve.out, "Layout file to write (default: standard output)");
    solve_cmd->add_option("--svg", solve.svg, "Top-down SVG to write");
    solve_cmd->add_flag("--full-6dof", solve.full_6dof, "Also optimize z, pitch and roll");
    solve_cmd->add_option("--max-evals", solve.max_evals, "Evaluation budget per restart")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--trace", solve.trace, "Write the annealing trace");
    solve_cmd->add_flag("--snap-only", solve.snap_only, "Restrict poses to the grid");
    solve_cmd->add_option("--grid-step", solve.grid_step, "Grid step for --snap-only")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--restarts", solve.restarts, "Number of restarts")->check(CLI::PositiveNumber);

    OracleOptions oracle;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exhaustive grid search (small instances only)");
    oracle_cmd->add_option("spec", oracle.spec, "Scene spec (JSON)")->required();
    oracle_cmd->add_option("--grid-step", oracle.grid_step, "Grid step in meters")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--out", oracle.out, "Layout file to write (default: standard output)");
    oracle_cmd->add_option("--svg", oracle.svg, "Top-down SVG to write");

    TrajOptions traj;
    CLI::App* traj_cmd = app.add_subcommand("traj", "Export the keyframes of a trajectory command");
    traj_cmd->add_option("spec", traj.spec, "Scene spec (JSON)")->required();
    traj_cmd->add_option("--command", traj.command, "Index into the spec's trajectories")->required();
    traj_cmd->add_option("--fps", traj.fps, "Frames per second")->check(CLI::PositiveNumber);
    traj_cmd->add_option("--out", traj.out, "Track file to write (default: standard output)");
    traj_cmd->add_option("--layout", traj.layout, "Solved layout to anchor against (default: solve the spec)");
    traj_cmd->add_option("--seed", traj.seed, "RNG seed used when solving the spec");

    CLI::App* forge_cmd = app.add_subcommand("forge", "Toy asset generation with a verification loop");
    forge_cmd->require_subcommand(1);
    ForgeRunOptions forge_run;
    CLI::App* run_cmd = forge_cmd->add_subcommand("run", "Run the generate/verify loop on a task");
    run_cmd->add_option("--task", forge_run.task, "Task file (JSON)")->required();
    run_cmd->add_option("--manual", forge_run.manual, "Manual file, created if missing")->required();
    run_cmd->add_option("--max-iters", forge_run.max_iters, "Attempt budget")->check(CLI::PositiveNumber);
    ForgeLookupOptions lookup;
    CLI::App* lookup_cmd = forge_cmd->add_subcommand("lookup", "Query the manual");
    lookup_cmd->add_option("--manual", lookup.manual, "Manual file")->required();
    lookup_cmd->add_option("--query", lookup.query, "Task text to match")->required();
    lookup_cmd->add_option("--top-k", lookup.top_k, "Maximum number of hits");
    lookup_cmd->add_option("--min-score", lookup.min_score, "Minimum Jaccard score");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (solve_cmd->parsed()) {
            return run_solve(solve, out);
        }
        if (oracle_cmd->parsed()) {
            return run_oracle(oracle, out);
        }
        if (traj_cmd->parsed()) {
            return run_traj(traj, out);
        }
        if (run_cmd->parsed()) {
            return run_forge(forge_run, out, err);
        }
        return run_lookup(lookup, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace layoutforge
