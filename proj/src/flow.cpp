#include "lvc/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lvc/errors.hpp"
#include "lvc/format.hpp"

namespace lvc {

ControlSignal::ControlSignal(std::size_t n_steps, std::size_t dim, double horizon)
    : n_steps_(n_steps), dim_(dim), horizon_(horizon), values_(n_steps * dim, 0.0)
{
    if (n_steps == 0) throw std::invalid_argument("control signal needs at least one step");
    if (!(horizon > 0.0)) throw std::invalid_argument("control signal horizon must be positive");
}

ControlSignal ControlSignal::constant(std::size_t n_steps, double horizon, ControlView value)
{
    ControlSignal s(n_steps, value.size(), horizon);
    for (std::size_t j = 0; j < n_steps; ++j) s.set(j, value);
    return s;
}

void ControlSignal::set(std::size_t step, ControlView value)
{
    if (value.size() != dim_) throw std::invalid_argument("control dimension mismatch");
    std::copy(value.begin(), value.end(), values_.begin() + static_cast<std::ptrdiff_t>(step * dim_));
}

ControlView ControlSignal::at_time(double t) const
{
    const auto idx = static_cast<std::ptrdiff_t>(std::floor(t / dt()));
    const auto last = static_cast<std::ptrdiff_t>(n_steps_) - 1;
    return at(static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, last)));
}

bool ControlSignal::admissible(const ControlSet& controls) const
{
    if (dim_ != controls.dim()) return false;
    for (std::size_t j = 0; j < n_steps_; ++j) {
        if (!controls.contains(at(j))) return false;
    }
    return true;
}

namespace {

// One step of length h (negative for backward integration) starting at (t, x).
Vec2 step(const ControlAffineField& field, Integrator integrator, double t, Vec2 x, ControlView u, double h)
{
    const Vec2 k1 = field.value(t, x, u);
    if (integrator == Integrator::euler) return x + h * k1;
    const Vec2 k2 = field.value(t + h, x + h * k1, u);
    return x + (0.5 * h) * (k1 + k2);
}

void check_finite(Vec2 x, double t)
{
    if (!is_finite(x)) {
        throw FlowError("characteristic became non-finite at t = " + format_number(t), t);
    }
}

}  // namespace

Vec2 advect(const ControlAffineField& field, const ControlSignal& signal, std::size_t from_node,
            std::size_t to_node, Vec2 x, Integrator integrator)
{
    const std::size_t n = signal.n_steps();
    if (from_node > n || to_node > n) throw std::out_of_range("advect: node outside the time grid");
    const double dt = signal.dt();
    check_finite(x, static_cast<double>(from_node) * dt);
    for (std::size_t j = from_node; j < to_node; ++j) {
        x = step(field, integrator, static_cast<double>(j) * dt, x, signal.at(j), dt);
        check_finite(x, static_cast<double>(j + 1) * dt);
    }
    for (std::size_t j = from_node; j > to_node; --j) {
        x = step(field, integrator, static_cast<double>(j) * dt, x, signal.at(j - 1), -dt);
        check_finite(x, static_cast<double>(j - 1) * dt);
    }
    return x;
}

Characteristic trace_characteristic(const ControlAffineField& field, const ControlSignal& signal,
                                    const InitialDensity& density, Vec2 y0, Direction direction,
                                    Integrator integrator)
{
    const std::size_t n = signal.n_steps();
    const double dt = signal.dt();
    Characteristic c;
    c.positions.resize(n + 1);
    c.jacobian_det.resize(n + 1);
    c.density.resize(n + 1);

    if (direction == Direction::forward_from_start) {
        c.positions[0] = y0;
        check_finite(y0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            c.positions[j + 1] = step(field, integrator, static_cast<double>(j) * dt, c.positions[j], signal.at(j), dt);
            check_finite(c.positions[j + 1], static_cast<double>(j + 1) * dt);
        }
    } else {
        c.positions[n] = y0;
        check_finite(y0, signal.horizon());
        for (std::size_t j = n; j > 0; --j) {
            c.positions[j - 1] =
                step(field, integrator, static_cast<double>(j) * dt, c.positions[j], signal.at(j - 1), -dt);
            check_finite(c.positions[j - 1], static_cast<double>(j - 1) * dt);
        }
    }

    const double rho0 = density(c.positions[0]);
    c.jacobian_det[0] = 1.0;
    c.density[0] = rho0;
    double div_here = field.divergence(0.0, c.positions[0], signal.at(0));
    for (std::size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) * dt;
        double rate = div_here;
        if (integrator == Integrator::heun) {
            const double div_next = field.divergence(t + dt, c.positions[j + 1], signal.at(j));
            rate = 0.5 * (div_here + div_next);
        }
        const double det = c.jacobian_det[j] * (1.0 + dt * rate);
        if (!(det > 0.0)) {
            std::ostringstream msg;
            msg << "Jacobian determinant reached " << format_number(det) << " at t = " << format_number(t + dt)
                << ", x = (" << format_number(c.positions[j].x1) << ", " << format_number(c.positions[j].x2)
                << "), div v = " << format_number(rate) << "; reduce the time step";
            throw FlowError(msg.str(), t + dt);
        }
        c.jacobian_det[j + 1] = det;
        c.density[j + 1] = rho0 / det;
        if (j + 1 < n) div_here = field.divergence(t + dt, c.positions[j + 1], signal.at(j + 1));
    }
    return c;
}

}  // namespace lvc
