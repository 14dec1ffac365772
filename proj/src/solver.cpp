#include "lvc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lvc/errors.hpp"

namespace lvc {

double GProfile::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
double GProfile::min() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }

std::size_t NeedleSet::count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)); }

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::converged: return "converged";
    case Termination::no_improvement: return "no_improvement";
    case Termination::stalled: return "stalled";
    case Termination::max_iterations: return "max_iterations";
    }
    return "unknown";
}

Control pointwise_argmin(const BoundaryCurve& curve, const ControlAffineField& field, const ControlSet& controls,
                         double t)
{
    if (!field.has_coordinate_maps()) {
        throw ConfigError("pointwise_argmin needs coordinate channel maps phi_i(t,u) = u_i");
    }
    const auto c = hamiltonian_coefficients(curve, field, t);
    return controls.linear_argmin(std::span<const double>(c).subspan(1));
}

Linearization linearize(const ProblemInstance& problem, const ControlSignal& control,
                        const BoundaryTrajectory& trajectory, Exec exec)
{
    if (!problem.field.has_coordinate_maps()) {
        throw ConfigError("linearization needs coordinate channel maps phi_i(t,u) = u_i");
    }
    const std::size_t n = control.n_steps();
    const std::size_t m = control.dim();
    Linearization lin{ControlSignal(n, m, control.horizon()), GProfile{std::vector<double>(n), control.dt()}};
    for_each_index(exec, n, [&](std::size_t j) {
        const double t = problem.time(j);
        const auto c = hamiltonian_coefficients(trajectory.curve(j), problem.field, t);
        const auto coeffs = std::span<const double>(c).subspan(1);
        const Control w = problem.controls.linear_argmin(coeffs);
        const auto u = control.at(j);
        double g = 0.0;
        for (std::size_t i = 0; i < m; ++i) g += coeffs[i] * (u[i] - w[i]);
        lin.w.set(j, w);
        lin.g.values[j] = g;
    });
    return lin;
}

NeedleSet needle_select(const GProfile& g, double epsilon)
{
    const std::size_t n = g.values.size();
    const double horizon = g.dt * static_cast<double>(n);
    if (!(epsilon > 0.0) || epsilon > horizon * (1.0 + 1e-12)) {
        throw std::invalid_argument("needle length must lie in (0, T]");
    }
    const double steps = std::ceil(epsilon / g.dt - 1e-9);
    const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(steps, 1.0)), 1, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return g.values[a] > g.values[b]; });

    NeedleSet needle{std::vector<bool>(n, false), g.dt * static_cast<double>(k)};
    for (std::size_t i = 0; i < k; ++i) needle.mask[order[i]] = true;
    return needle;
}

ControlSignal mix_controls(const ControlSignal& u, const ControlSignal& w, const NeedleSet& needle)
{
    if (u.n_steps() != w.n_steps() || u.dim() != w.dim() || needle.mask.size() != u.n_steps()) {
        throw std::invalid_argument("mix_controls: length mismatch");
    }
    ControlSignal out = u;
    for (std::size_t j = 0; j < u.n_steps(); ++j) {
        if (needle.mask[j]) out.set(j, w.at(j));
    }
    return out;
}

CostEvaluation evaluate_cost(const ProblemInstance& problem, const ControlSignal& signal, Exec exec)
{
    CostEvaluation out;
    out.trajectory = trace_target(problem, signal, exec);
    out.cost = stokes_mass(out.trajectory.curve(0), problem.density);
    return out;
}

LineSearchResult line_search_epsilon(const ProblemInstance& problem, const SolverState& state,
                                     const ControlSignal& w, const GProfile& g, Exec exec)
{
    if (!(g.max() > 0.0)) {
        throw std::invalid_argument("line search needs a strictly positive gain profile");
    }
    const double horizon = g.dt * static_cast<double>(g.values.size());
    std::vector<double> grid;
    for (double eps = horizon; eps >= g.dt * (1.0 - 1e-9); eps *= 0.5) grid.push_back(eps);
    if (grid.back() > g.dt * (1.0 + 1e-9)) grid.push_back(g.dt);

    LineSearchResult best;
    best.cost = state.cost;
    best.signal = state.control;

    ControlSignal previous;
    for (double eps : grid) {
        const NeedleSet needle = needle_select(g, eps);
        ControlSignal candidate = mix_controls(state.control, w, needle);
        // Identical candidates cost the same; skip the trace.
        if (candidate == state.control || candidate == previous) continue;
        auto eval = evaluate_cost(problem, candidate, exec);
        if (eval.cost > best.cost) {
            best.epsilon = eps;
            best.cost = eval.cost;
            best.signal = candidate;
            best.trajectory = std::move(eval.trajectory);
            best.needle_measure = needle.measure;
        }
        previous = std::move(candidate);
    }
    return best;
}

SolverState solve(const ProblemInstance& problem, const ControlSignal& u0, const SolverConfig& config)
{
    if (!u0.admissible(problem.controls)) throw std::invalid_argument("initial control is not admissible");
    using clock = std::chrono::steady_clock;

    SolverState state;
    state.control = u0;
    {
        auto eval = evaluate_cost(problem, u0, config.exec);
        state.cost = eval.cost;
        state.initial_cost = eval.cost;
        state.trajectory = std::move(eval.trajectory);
    }

    double tol_g = 0.0;
    state.termination = Termination::max_iterations;
    for (std::size_t it = 1; it <= config.max_iters; ++it) {
        const auto started = clock::now();
        const Linearization lin = linearize(problem, state.control, state.trajectory, config.exec);
        const double residual = lin.g.max();
        if (it == 1) tol_g = std::max(config.tol_g_abs, config.tol_g_rel * residual);
        state.tol_g = tol_g;

        IterationRecord rec;
        rec.iteration = it;
        rec.residual = residual;
        rec.cost = state.cost;
        auto finish = [&] {
            rec.wall_time_ms = std::chrono::duration<double, std::milli>(clock::now() - started).count();
            state.diagnostics.push_back(rec);
        };

        if (residual <= tol_g) {
            finish();
            state.termination = Termination::converged;
            break;
        }

        auto ls = line_search_epsilon(problem, state, lin.w, lin.g, config.exec);
        if (ls.epsilon == 0.0) {
            finish();
            state.termination = Termination::no_improvement;
            break;
        }

        rec.cost_delta = ls.cost - state.cost;
        rec.cost = ls.cost;
        rec.epsilon = ls.epsilon;
        rec.needle_measure = ls.needle_measure;
        state.control = std::move(ls.signal);
        state.cost = ls.cost;
        state.trajectory = std::move(ls.trajectory);
        finish();
        if (rec.cost_delta <= config.tol_improve * std::abs(state.cost)) {
            state.termination = Termination::stalled;
            break;
        }
    }
    state.iteration = state.diagnostics.size();
    return state;
}

double optimality_residual(const ProblemInstance& problem, const SolverState& state, Exec exec)
{
    const auto lin = linearize(problem, state.control, state.trajectory, exec);
    return std::max(0.0, lin.g.max());
}

ControlSignal default_initial_signal(const ProblemInstance& problem)
{
    Control u = problem.initial_control;
    if (u.empty()) u.assign(problem.controls.dim(), 0.0);
    return ControlSignal::constant(problem.n_time_steps, problem.horizon, u);
}

}  // namespace lvc
