#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lvc/geometry.hpp"
#include "lvc/problem.hpp"

namespace lvc {

/// Piecewise-constant control on the uniform grid t_j = j * dt, dt = horizon / n_steps.
/// Step j covers [t_j, t_{j+1}); the last step also owns t = horizon.
class ControlSignal {
public:
    ControlSignal() = default;
    ControlSignal(std::size_t n_steps, std::size_t dim, double horizon);

    static ControlSignal constant(std::size_t n_steps, double horizon, ControlView value);

    std::size_t n_steps() const { return n_steps_; }
    std::size_t dim() const { return dim_; }
    double horizon() const { return horizon_; }
    double dt() const { return horizon_ / static_cast<double>(n_steps_); }

    ControlView at(std::size_t step) const { return {values_.data() + step * dim_, dim_}; }
    std::span<double> at(std::size_t step) { return {values_.data() + step * dim_, dim_}; }
    void set(std::size_t step, ControlView value);

    /// u(t) = values[floor(t / dt)], with t = horizon mapped to the last step.
    ControlView at_time(double t) const;

    bool admissible(const ControlSet& controls) const;

    friend bool operator==(const ControlSignal&, const ControlSignal&) = default;

private:
    std::size_t n_steps_ = 0;
    std::size_t dim_ = 0;
    double horizon_ = 0.0;
    std::vector<double> values_;
};

/// Characteristic sampled at every grid node 0..n_steps.
struct Characteristic {
    std::vector<Vec2> positions;
    std::vector<double> jacobian_det;  // det D Phi_{0,t_j}, anchored at time 0
    std::vector<double> density;       // rho(t_j, positions[j])
};

enum class Direction { forward_from_start, backward_from_end };

/// Explicit Euler (or Heun) trajectory from grid node `from_node` to `to_node`.
/// Backward integration (to_node < from_node) steps from t_j to t_{j-1} with the control
/// of step j-1. Throws FlowError when the state stops being finite.
Vec2 advect(const ControlAffineField& field, const ControlSignal& signal, std::size_t from_node,
            std::size_t to_node, Vec2 x, Integrator integrator = Integrator::euler);

/// Positions of the characteristic through y0 together with the Jacobian determinant
/// of the flow from time 0 and the transported density rho0(positions[0]) / det.
///
/// forward_from_start: y0 is the position at t = 0.
/// backward_from_end:  y0 is the position at t = T; positions are integrated back to 0,
///                     then the determinant is integrated forward from 0.
///
/// The determinant follows det_{j+1} = det_j (1 + dt div v(t_j, x_j, u_j)) (Euler), or the
/// trapezoidal average of the divergence at both ends of the step (Heun). A non-positive
/// determinant throws FlowError.
Characteristic trace_characteristic(const ControlAffineField& field, const ControlSignal& signal,
                                    const InitialDensity& density, Vec2 y0, Direction direction,
                                    Integrator integrator = Integrator::euler);

}  // namespace lvc
