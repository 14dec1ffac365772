#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lvc/boundary.hpp"
#include "lvc/exec.hpp"
#include "lvc/flow.hpp"
#include "lvc/problem.hpp"

namespace lvc {

/// g_j = H(t_j, u(t_j)) - H(t_j, w(t_j)) per time step.
struct GProfile {
    std::vector<double> values;
    double dt = 0.0;

    double max() const;
    double min() const;
};

/// Union of whole time steps used as the needle set.
struct NeedleSet {
    std::vector<bool> mask;
    double measure = 0.0;

    std::size_t count() const;
};

struct IterationRecord {
    std::size_t iteration = 0;
    double cost = 0.0;            // J after the iteration
    double residual = 0.0;        // max g of the control the iteration started from
    double epsilon = 0.0;         // accepted needle length; 0 when nothing was accepted
    double needle_measure = 0.0;  // measure of the accepted needle set
    double cost_delta = 0.0;
    double wall_time_ms = 0.0;
};

enum class Termination { converged, no_improvement, stalled, max_iterations };

std::string to_string(Termination t);

struct SolverState {
    ControlSignal control;
    double cost = 0.0;
    double initial_cost = 0.0;
    double tol_g = 0.0;  // effective residual tolerance used for termination
    std::size_t iteration = 0;
    BoundaryTrajectory trajectory;
    std::vector<IterationRecord> diagnostics;
    Termination termination = Termination::max_iterations;
};

struct SolverConfig {
    std::size_t max_iters = 50;
    double tol_g_rel = 1e-6;   // relative to the residual of the starting control
    double tol_g_abs = 0.0;    // absolute floor; the effective tolerance is the larger one
    double tol_improve = 1e-10;  // stop once an accepted step gains less than tol_improve * |J|
    Exec exec = Exec::parallel;
};

/// Tolerance below which a g value counts as zero (argmin round-off).
inline constexpr double kArgminTolerance = 1e-9;

/// Minimizer of the boundary Hamiltonian over the control set. Uses the affine structure:
/// H(omega) = c0 + sum_i c_i omega_i, minimized in closed form by the control set.
/// Requires coordinate channel maps.
Control pointwise_argmin(const BoundaryCurve& curve, const ControlAffineField& field, const ControlSet& controls,
                         double t);

/// Pointwise argmin w and gain profile g for every time step of `control`, computed from
/// its trajectory in a single sweep.
struct Linearization {
    ControlSignal w;
    GProfile g;
};

Linearization linearize(const ProblemInstance& problem, const ControlSignal& control,
                        const BoundaryTrajectory& trajectory, Exec exec = Exec::parallel);

/// Top ceil(eps / dt) steps by g (ties: earlier step first). Requires 0 < eps <= T.
NeedleSet needle_select(const GProfile& g, double epsilon);

/// w on the needle set, u elsewhere.
ControlSignal mix_controls(const ControlSignal& u, const ControlSignal& w, const NeedleSet& needle);

struct CostEvaluation {
    double cost = 0.0;
    BoundaryTrajectory trajectory;
};

/// J[u]: traces the target boundary backward and integrates rho0 over A^0 by stokes_mass.
CostEvaluation evaluate_cost(const ProblemInstance& problem, const ControlSignal& signal,
                             Exec exec = Exec::parallel);

struct LineSearchResult {
    double epsilon = 0.0;  // 0 signals that no candidate improved the cost
    double cost = 0.0;
    ControlSignal signal;
    BoundaryTrajectory trajectory;  // empty when epsilon == 0
    double needle_measure = 0.0;
};

/// Tries eps in {T, T/2, T/4, ...} down to dt and keeps the best strict improvement.
/// Requires max g > kArgminTolerance.
LineSearchResult line_search_epsilon(const ProblemInstance& problem, const SolverState& state,
                                     const ControlSignal& w, const GProfile& g, Exec exec = Exec::parallel);

/// Needle-linearization iteration from u0.
SolverState solve(const ProblemInstance& problem, const ControlSignal& u0, const SolverConfig& config = {});

/// max_j g_j for the state's control; zero certifies the discrete minimum condition.
double optimality_residual(const ProblemInstance& problem, const SolverState& state, Exec exec = Exec::parallel);

/// Starting control of the benchmark (problem.initial_control held on every step).
ControlSignal default_initial_signal(const ProblemInstance& problem);

}  // namespace lvc
