#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lvc/problem.hpp"
#include "lvc/solver.hpp"

namespace lvc {

/// Recorded solver run used as a regression baseline.
struct BaselineRecord {
    std::string benchmark;
    std::uint64_t config_hash = 0;
    std::vector<double> costs;  // J[u^0], J[u^1], ...
    double final_residual = 0.0;
    std::string provenance;
    std::size_t max_iters = 0;
    ParameterMap parameters;
};

/// FNV-1a over the model parameters (everything except the discretization keys
/// problem.n_time_steps, problem.n_boundary_pts and problem.resample). A changed time
/// step therefore compares against the same baseline, while a changed model does not.
std::uint64_t config_hash(const ParameterMap& parameters);

/// Discretization used for stored baselines; small enough to rerun in tests.
ParameterMap baseline_discretization();

/// Runs the benchmark from its default starting control.
BaselineRecord run_baseline(const std::string& name, const ParameterMap& overrides, std::size_t max_iters);

/// Writes <dir>/<name>.csv (iteration, cost) and <dir>/<name>.cfg (key = value snapshot).
void write_baseline(const std::filesystem::path& dir, const BaselineRecord& record);

/// Throws std::runtime_error when either file is missing.
BaselineRecord read_baseline(const std::filesystem::path& dir, const std::string& name);

struct RegressionReport {
    std::string benchmark;
    bool passed = false;
    bool config_match = false;
    std::optional<std::size_t> first_divergence;  // index into the cost sequence
    double max_drift = 0.0;
    std::string message;
};

/// Reruns the benchmark with the baseline's parameters (plus `overrides`) and compares the
/// cost sequence entrywise within `tolerance`. A differing config hash fails without
/// comparing costs.
RegressionReport regression_check(const std::filesystem::path& dir, const std::string& name, double tolerance,
                                  const ParameterMap& overrides = {});

/// Commit the library was built from, or "unknown".
std::string build_provenance();

}  // namespace lvc
