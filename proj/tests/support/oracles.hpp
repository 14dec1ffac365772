#pragma once

// Reference computations used only by tests. They avoid the library's own quadrature,
// Stokes and sampling code paths so agreement is meaningful.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include "lvc/flow.hpp"
#include "lvc/geometry.hpp"
#include "lvc/problem.hpp"

namespace lvc::testing {

/// Mass of a centered standard Gaussian (sigma) inside the disc of radius r at its center.
inline double gaussian_disc_mass(double r, double sigma = 1.0)
{
    return 1.0 - std::exp(-r * r / (2.0 * sigma * sigma));
}

/// Midpoint rule over [c - h, c + h]^2 of f(x) * [inside(x)].
inline double box_quadrature(const std::function<double(Vec2)>& f, const std::function<bool(Vec2)>& inside,
                             Vec2 c, double h, std::size_t n)
{
    const double cell = 2.0 * h / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 x{c.x1 - h + (static_cast<double>(i) + 0.5) * cell,
                         c.x2 - h + (static_cast<double>(k) + 0.5) * cell};
            if (inside(x)) sum += f(x);
        }
    }
    return sum * cell * cell;
}

/// Plain forward Euler for x' = v(t, x, u(t)), written against field.value only.
inline Vec2 euler_forward(const ControlAffineField& field, const ControlSignal& u, Vec2 x)
{
    const double dt = u.dt();
    for (std::size_t j = 0; j < u.n_steps(); ++j) {
        x = x + dt * field.value(static_cast<double>(j) * dt, x, u.at(j));
    }
    return x;
}

struct McResult {
    double value;
    double std_error;
};

/// Particle estimate with std::normal_distribution, independent of the library sampler.
inline McResult particle_estimate(const ProblemInstance& p, const ControlSignal& u, std::size_t n, unsigned seed)
{
    const auto& g = *p.density.gaussian_params();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, g.sigma);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = normal(rng);
        const double b = normal(rng);
        if (p.target.contains(euler_forward(p.field, u, Vec2{g.center.x1 + a, g.center.x2 + b}))) ++hits;
    }
    const double q = static_cast<double>(hits) / static_cast<double>(n);
    return {q, std::sqrt(q * (1.0 - q) / static_cast<double>(n))};
}

/// Determinant of the central-difference Jacobian of the forward flow map at y.
inline double fd_flow_jacobian(const ControlAffineField& field, const ControlSignal& u, Vec2 y, double h)
{
    const std::size_t n = u.n_steps();
    const Vec2 px = advect(field, u, 0, n, y + Vec2{h, 0.0});
    const Vec2 mx = advect(field, u, 0, n, y - Vec2{h, 0.0});
    const Vec2 py = advect(field, u, 0, n, y + Vec2{0.0, h});
    const Vec2 my = advect(field, u, 0, n, y - Vec2{0.0, h});
    const Vec2 c1 = (1.0 / (2.0 * h)) * (px - mx);
    const Vec2 c2 = (1.0 / (2.0 * h)) * (py - my);
    return c1.x1 * c2.x2 - c1.x2 * c2.x1;
}

/// Star-shaped counterclockwise polygon with random radii around c.
inline std::vector<Vec2> random_star_polygon(std::mt19937_64& rng, std::size_t n, Vec2 c = {})
{
    std::uniform_real_distribution<double> radius(0.5, 2.0);
    std::vector<Vec2> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        const double r = radius(rng);
        v[i] = c + Vec2{r * std::cos(th), r * std::sin(th)};
    }
    return v;
}

/// Uniformly random feasible point of a box, ball or simplex (rejection-free).
inline Control random_feasible(const ControlSet& set, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& var = set.variant();
    if (const auto* box = std::get_if<BoxSet>(&var)) {
        Control w(box->lo.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = box->lo[i] + unit(rng) * (box->hi[i] - box->lo[i]);
        return w;
    }
    if (const auto* ball = std::get_if<BallSet>(&var)) {
        std::normal_distribution<double> normal;
        Control d(ball->center.size());
        double n2 = 0.0;
        for (auto& di : d) {
            di = normal(rng);
            n2 += di * di;
        }
        const double r = ball->radius * std::pow(unit(rng), 1.0 / static_cast<double>(d.size()));
        Control w = ball->center;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += r * d[i] / std::sqrt(n2);
        return w;
    }
    const auto& simplex = std::get<SimplexSet>(var);
    std::exponential_distribution<double> expo(1.0);
    Control w(simplex.m);
    double sum = 0.0;
    for (auto& wi : w) sum += (wi = expo(rng));
    for (auto& wi : w) wi /= sum;
    return w;
}

inline double dot_product(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// v(t, x, u) = drift(x) + u * (0, 0): a single inert channel on a singleton box.
inline ProblemInstance drift_only_problem(VectorTerm drift, ScalarTerm div, TargetSet target, double horizon,
                                          std::size_t steps, std::size_t points)
{
    ProblemInstance p;
    p.name = "custom";
    p.field = ControlAffineField(std::move(drift), {[](double, Vec2) { return Vec2{0.0, 0.0}; }});
    p.field.set_analytic_divergence(std::move(div), {[](double, Vec2) { return 0.0; }});
    p.controls = ControlSet::box({0.0}, {0.0});
    p.density = InitialDensity::gaussian(1.0);
    p.target = std::move(target);
    p.horizon = horizon;
    p.n_time_steps = steps;
    p.n_boundary_pts = points;
    p.initial_control = {0.0};
    return p;
}

inline ProblemInstance still_problem(TargetSet target, std::size_t steps = 50, std::size_t points = 400)
{
    return drift_only_problem([](double, Vec2) { return Vec2{0.0, 0.0}; }, [](double, Vec2) { return 0.0; },
                              std::move(target), 1.0, steps, points);
}

}  // namespace lvc::testing
