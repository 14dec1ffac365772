#include "lvc/app.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lvc/bench.hpp"
#include "lvc/errors.hpp"
#include "lvc/format.hpp"
#include "lvc/io.hpp"
#include "lvc/oracle.hpp"

namespace lvc {

namespace {

constexpr double kMcAbsTolerance = 1e-2;
constexpr double kGridTolerance = 5e-3;

nlohmann::json validation_block(const ProblemInstance& problem, const ControlSignal& signal, double stokes,
                                const RunConfig& config)
{
    const auto mc = mc_cost(problem, signal, config.mc_samples, config.seed, config.solver.exec);
    const double half_width = 6.0 * problem.density.scale();
    const double grid = grid_cost(problem, signal, half_width, config.grid_cells, config.solver.exec);
    const double mc_bound = std::max(3.0 * mc.std_error, kMcAbsTolerance);
    nlohmann::json j;
    j["stokes"] = stokes;
    j["mc"] = mc.value;
    j["mc_std_error"] = mc.std_error;
    j["mc_samples"] = mc.n_samples;
    j["grid"] = grid;
    j["grid_cells"] = config.grid_cells;
    j["abs_diff_stokes_mc"] = std::abs(stokes - mc.value);
    j["mc_bound"] = mc_bound;
    j["mc_agrees"] = std::abs(stokes - mc.value) <= mc_bound;
    j["abs_diff_stokes_grid"] = std::abs(stokes - grid);
    j["grid_bound"] = kGridTolerance;
    j["grid_agrees"] = std::abs(stokes - grid) <= kGridTolerance;
    return j;
}

std::string frame_name(std::size_t index, const char* ext)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04zu.%s", index, ext);
    return buf;
}

}  // namespace

ProblemInstance build_problem(const RunConfig& config)
{
    std::string name = config.benchmark;
    ParameterMap params;
    if (!config.config_path.empty()) {
        params = parse_config_text(read_text_file(config.config_path));
        const auto it = params.find("problem.name");
        if (it == params.end()) throw ConfigError("configuration is missing 'problem.name'");
        name = it->second;
        params.erase(it);
    }
    if (name.empty()) throw ConfigError("either --benchmark or --config is required");
    for (const auto& [k, v] : config.overrides) params[k] = v;
    if (config.boundary_points) params["problem.n_boundary_pts"] = std::to_string(*config.boundary_points);
    if (config.time_steps) params["problem.n_time_steps"] = std::to_string(*config.time_steps);

    if (config.dt) {
        // The horizon may itself come from the configuration; resolve it first.
        const double horizon = make_benchmark(name, params).horizon;
        const double steps = std::round(horizon / *config.dt);
        if (!(*config.dt > 0.0) || steps < 2.0 || std::abs(steps * *config.dt - horizon) > 1e-9 * horizon) {
            throw ConfigError("--dt " + format_number(*config.dt) + " does not divide T = " + format_number(horizon));
        }
        params["problem.n_time_steps"] = std::to_string(static_cast<std::size_t>(steps));
    }
    return make_benchmark(name, params);
}

int run(const RunConfig& config, std::ostream& log)
{
    if (config.frame_stride < 1) {
        log << "error: frame stride must be at least 1\n";
        return kExitConfig;
    }
    ProblemInstance problem;
    try {
        problem = build_problem(config);
    } catch (const std::exception& e) {
        log << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.out_dir / "frames", ec);
    if (ec) {
        log << "error: cannot create output directory " << config.out_dir << ": " << ec.message() << '\n';
        return kExitIo;
    }

    const ControlSignal u0 = default_initial_signal(problem);
    SolverState state;
    nlohmann::json summary;
    try {
        state = solve(problem, u0, config.solver);
        summary["final_residual"] = optimality_residual(problem, state, config.solver.exec);
        if (config.validate) {
            summary["validation"]["initial_control"] = validation_block(problem, u0, state.initial_cost, config);
            summary["validation"]["final_control"] = state.control == u0
                                                          ? summary["validation"]["initial_control"]
                                                          : validation_block(problem, state.control, state.cost, config);
        }
    } catch (const FlowError& e) {
        log << "numerical failure at t = " << format_number(e.time()) << ": " << e.what() << '\n';
        write_text_file(config.out_dir / "failure.txt", std::string(e.what()) + '\n');
        return kExitNumeric;
    } catch (const GeometryError& e) {
        log << "numerical failure: " << e.what() << '\n';
        write_text_file(config.out_dir / "failure.txt", std::string(e.what()) + '\n');
        return kExitNumeric;
    }

    try {
        SolverState for_csv = state;
        if (!config.record_timing) {
            for (auto& d : for_csv.diagnostics) d.wall_time_ms = 0.0;
        }
        std::ostringstream conv;
        write_convergence_csv(conv, for_csv);
        write_text_file(config.out_dir / "convergence.csv", conv.str());

        std::ostringstream ctrl;
        write_control_csv(ctrl, state.control);
        write_text_file(config.out_dir / "control.csv", ctrl.str());

        const std::size_t n_nodes = state.trajectory.n_nodes();
        std::size_t frame = 0;
        for (std::size_t node = 0; node < n_nodes; ++node) {
            if (node % config.frame_stride != 0 && node + 1 != n_nodes) continue;
            const BoundaryCurve curve = state.trajectory.curve(node);
            std::ostringstream csv;
            write_curve_csv(csv, curve);
            write_text_file(config.out_dir / "frames" / frame_name(frame, "csv"), csv.str());
            if (config.svg) {
                std::ostringstream svg;
                write_frame_svg(svg, curve, problem);
                write_text_file(config.out_dir / "frames" / frame_name(frame, "svg"), svg.str());
            }
            ++frame;
        }

        summary["benchmark"] = problem.name;
        summary["parameters"] = problem.parameters;
        summary["control_set"] = problem.controls.describe();
        summary["target"] = problem.target.describe();
        summary["solver"] = {{"max_iters", config.solver.max_iters},
                             {"tol_g_rel", config.solver.tol_g_rel},
                             {"tol_g_abs", config.solver.tol_g_abs},
                             {"tol_g_effective", state.tol_g},
                             {"tol_improve", config.solver.tol_improve}};
        summary["seed"] = config.seed;
        summary["termination"] = to_string(state.termination);
        summary["iterations"] = state.iteration;
        summary["initial_cost"] = state.initial_cost;
        summary["final_cost"] = state.cost;
        summary["boundary_vertices"] = state.trajectory.n_vertices();
        summary["frames"] = frame;
        write_text_file(config.out_dir / "summary.json", summary.dump(2) + '\n');
    } catch (const std::exception& e) {
        log << "error writing outputs: " << e.what() << '\n';
        return kExitIo;
    }

    log << problem.name << ": J " << format_number(state.initial_cost) << " -> " << format_number(state.cost)
        << " after " << state.iteration << " iterations (" << to_string(state.termination) << ")\n";
    if (config.validate) {
        for (const char* which : {"initial_control", "final_control"}) {
            const auto& v = summary["validation"][which];
            log << "  " << which << ": stokes " << format_number(v["stokes"].get<double>()) << ", mc "
                << format_number(v["mc"].get<double>()) << " +- " << format_number(v["mc_std_error"].get<double>())
                << ", grid " << format_number(v["grid"].get<double>())
                << (v["mc_agrees"].get<bool>() && v["grid_agrees"].get<bool>() ? "  [agree]" : "  [DISAGREE]")
                << '\n';
        }
    }
    return kExitOk;
}

namespace {

ParameterMap parse_sets(const std::vector<std::string>& sets)
{
    ParameterMap out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
        out[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv)
{
    CLI::App app{"Needle-linearization solver for mass-maximizing control of the continuity equation"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<std::string> sets;
    std::string integrator;
    bool no_resample = false;
    bool serial = false;

    auto* run_cmd = app.add_subcommand("run", "Solve a problem and write trajectory frames and logs");
    auto* bench_opt = run_cmd->add_option("--benchmark", cfg.benchmark, "boat, pendulum or sheep");
    auto* config_opt = run_cmd->add_option("--config", cfg.config_path, "key = value problem configuration file");
    bench_opt->excludes(config_opt);
    run_cmd->add_option("--iters", cfg.solver.max_iters, "Maximum solver iterations")->capture_default_str();
    auto* dt_opt = run_cmd->add_option("--dt", cfg.dt, "Time step (must divide T)");
    auto* steps_opt = run_cmd->add_option("--time-steps", cfg.time_steps, "Number of time steps");
    dt_opt->excludes(steps_opt);
    run_cmd->add_option("--boundary-points", cfg.boundary_points, "Initial target boundary samples");
    run_cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    run_cmd->add_option("--frames-stride", cfg.frame_stride, "Write every N-th time node as a frame")
        ->capture_default_str();
    run_cmd->add_flag("--svg", cfg.svg, "Also write SVG frames");
    run_cmd->add_flag("--validate", cfg.validate, "Cross-check the cost with Monte Carlo and grid oracles");
    run_cmd->add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
    run_cmd->add_option("--tol-g", cfg.solver.tol_g_abs, "Absolute residual tolerance");
    run_cmd->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples for --validate")->capture_default_str();
    run_cmd->add_option("--grid-cells", cfg.grid_cells, "Grid cells per axis for --validate")->capture_default_str();
    run_cmd->add_option("--set", sets, "Override a configuration key (key=value)");
    run_cmd->add_option("--integrator", integrator, "euler or heun");
    run_cmd->add_flag("--no-resample", no_resample, "Keep the initial boundary sampling fixed");
    run_cmd->add_flag("--record-timing", cfg.record_timing, "Record wall time in convergence.csv");
    run_cmd->add_flag("--serial", serial, "Use the serial reference kernels");

    std::string bl_name;
    std::filesystem::path bl_dir = "bench/baselines";
    std::size_t bl_iters = 8;
    double tolerance = 1e-9;
    auto* baseline_cmd = app.add_subcommand("baseline", "Record a regression baseline");
    baseline_cmd->add_option("--benchmark", bl_name, "boat, pendulum or sheep")->required();
    baseline_cmd->add_option("--dir", bl_dir, "Baseline directory")->capture_default_str();
    baseline_cmd->add_option("--iters", bl_iters, "Solver iterations")->capture_default_str();
    baseline_cmd->add_option("--set", sets, "Override a configuration key (key=value)");

    auto* regress_cmd = app.add_subcommand("regress", "Compare a benchmark rerun against its baseline");
    regress_cmd->add_option("--benchmark", bl_name, "boat, pendulum or sheep")->required();
    regress_cmd->add_option("--dir", bl_dir, "Baseline directory")->capture_default_str();
    regress_cmd->add_option("--tolerance", tolerance, "Per-iteration cost tolerance")->capture_default_str();
    regress_cmd->add_option("--set", sets, "Override a configuration key (key=value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        for (auto* sub : app.get_subcommands()) std::cerr << '\n' << sub->help();
        return kExitUsage;
    }

    try {
        const ParameterMap overrides = parse_sets(sets);
        if (*run_cmd) {
            cfg.overrides = overrides;
            if (!integrator.empty()) cfg.overrides["problem.integrator"] = integrator;
            if (no_resample) cfg.overrides["problem.resample"] = "0";
            if (serial) cfg.solver.exec = Exec::serial;
            return run(cfg, std::cerr);
        }
        if (*baseline_cmd) {
            const auto rec = run_baseline(bl_name, overrides, bl_iters);
            write_baseline(bl_dir, rec);
            std::cerr << "wrote baseline " << (bl_dir / (bl_name + ".csv")).string() << " (" << rec.costs.size()
                      << " costs)\n";
            return kExitOk;
        }
        const auto report = regression_check(bl_dir, bl_name, tolerance, overrides);
        std::cout << (report.passed ? "PASS " : "FAIL ") << report.message << '\n';
        return report.passed ? kExitOk : kExitNumeric;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace lvc
