#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "lvc/boundary.hpp"
#include "lvc/format.hpp"
#include "lvc/flow.hpp"
#include "lvc/solver.hpp"

namespace lvc {

/// Columns: t, vertex_index, x1, x2, rho, jac_det.
void write_curve_csv(std::ostream& out, const BoundaryCurve& curve);

/// Columns: t, u1..um. One row per time step, t = left end of the step.
void write_control_csv(std::ostream& out, const ControlSignal& signal);

/// Columns: iteration, cost, residual, epsilon, needle_measure, wall_time_ms.
/// Row 0 is the starting control; the residual of row k is the one computed at the
/// start of iteration k (for row 0, of the starting control).
void write_convergence_csv(std::ostream& out, const SolverState& state);

/// Boundary of A^t drawn over a heat map of rho0, with the target outline for reference.
void write_frame_svg(std::ostream& out, const BoundaryCurve& curve, const ProblemInstance& problem);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace lvc
