#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "lvc/problem.hpp"
#include "lvc/solver.hpp"

namespace lvc {

struct RunConfig {
    std::string benchmark;                 // either this ...
    std::filesystem::path config_path;     // ... or a key = value configuration file
    ParameterMap overrides;                // applied on top of either
    std::optional<std::size_t> time_steps;
    std::optional<double> dt;
    std::optional<std::size_t> boundary_points;
    SolverConfig solver;
    bool validate = false;
    std::size_t mc_samples = 1'000'000;
    std::size_t grid_cells = 512;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";
    std::size_t frame_stride = 100;
    bool svg = false;
    bool record_timing = false;  // off keeps every output byte-reproducible
};

/// Exit codes of run().
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitNumeric = 3, kExitIo = 4 };

/// Builds the problem described by the run configuration.
ProblemInstance build_problem(const RunConfig& config);

/// Solves and writes frames/, control.csv, convergence.csv and summary.json into
/// config.out_dir. Diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// Command-line entry point: `run`, `baseline` and `regress` subcommands.
int cli_main(int argc, const char* const* argv);

}  // namespace lvc
