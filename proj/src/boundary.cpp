#include "lvc/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "lvc/errors.hpp"

namespace lvc {

double signed_area(std::span<const Vec2> vertices)
{
    const std::size_t n = vertices.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) twice += cross(vertices[i], vertices[(i + 1) % n]);
    return 0.5 * twice;
}

namespace {

// rotate_cw(x_{i+1} - x_{i-1}) / 2, i.e. n_i * w_i.
Vec2 weighted_normal(std::span<const Vec2> v, std::size_t i)
{
    const std::size_t n = v.size();
    const Vec2 chord = v[(i + 1) % n] - v[(i + n - 1) % n];
    if (chord.x1 == 0.0 && chord.x2 == 0.0) {
        throw GeometryError("degenerate boundary: coincident neighbours around vertex " + std::to_string(i));
    }
    return 0.5 * rotate_cw(chord);
}

void require_polygon(const BoundaryCurve& curve)
{
    if (curve.size() < 3) throw GeometryError("boundary curve needs at least 3 vertices");
    if (!(signed_area(curve.vertices) > 0.0)) {
        throw GeometryError("boundary curve is not counterclockwise (non-positive signed area)");
    }
}

void require_payload(const BoundaryCurve& curve)
{
    if (curve.density.size() != curve.size()) throw std::invalid_argument("boundary curve density not populated");
}

}  // namespace

std::vector<Vec2> outward_normals(const BoundaryCurve& curve)
{
    require_polygon(curve);
    std::vector<Vec2> normals(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Vec2 nw = weighted_normal(curve.vertices, i);
        normals[i] = (1.0 / norm(nw)) * nw;
    }
    return normals;
}

std::vector<double> boundary_weights(const BoundaryCurve& curve)
{
    std::vector<double> w(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) w[i] = norm(weighted_normal(curve.vertices, i));
    return w;
}

double hamiltonian_integral(const BoundaryCurve& curve, const ControlAffineField& field, double t,
                            ControlView omega)
{
    require_payload(curve);
    double sum = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Vec2 nw = weighted_normal(curve.vertices, i);
        sum += curve.density[i] * dot(field.value(t, curve.vertices[i], omega), nw);
    }
    return sum;
}

std::vector<double> hamiltonian_coefficients(const BoundaryCurve& curve, const ControlAffineField& field,
                                             double t)
{
    require_payload(curve);
    const std::size_t m = field.num_channels();
    std::vector<double> c(m + 1, 0.0);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Vec2 nw = curve.density[i] * weighted_normal(curve.vertices, i);
        const Vec2 x = curve.vertices[i];
        c[0] += dot(field.drift(t, x), nw);
        for (std::size_t k = 0; k < m; ++k) c[k + 1] += dot(field.channel(k, t, x), nw);
    }
    return c;
}

double stokes_mass(const BoundaryCurve& curve, const InitialDensity& density)
{
    require_polygon(curve);
    const auto& v = curve.vertices;
    const std::size_t n = v.size();
    // Anchor the primitive at the x1 tail on the curve's side of the density center, so
    // curves far from the mass do not sum large cancelling terms.
    double mean_x1 = 0.0;
    for (const auto& p : v) mean_x1 += p.x1;
    const bool lower = mean_x1 / static_cast<double>(n) <= density.center().x1;
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % n];
        const Vec2 mid = 0.5 * (a + b);
        mass += density.tail_antiderivative(mid.x1, mid.x2, lower) * (b.x2 - a.x2);
    }
    return mass;
}

BoundaryCurve resample(const BoundaryCurve& curve, double max_segment, double min_segment)
{
    if (!(min_segment > 0.0) || !(max_segment >= 2.0 * min_segment)) {
        throw std::invalid_argument("resample thresholds must satisfy max >= 2 min > 0");
    }
    const std::size_t n = curve.size();
    const bool has_rho = curve.density.size() == n;
    const bool has_det = curve.jacobian_det.size() == n;

    BoundaryCurve split;
    split.time = curve.time;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t next = (i + 1) % n;
        split.vertices.push_back(curve.vertices[i]);
        if (has_rho) split.density.push_back(curve.density[i]);
        if (has_det) split.jacobian_det.push_back(curve.jacobian_det[i]);
        const double len = norm(curve.vertices[next] - curve.vertices[i]);
        if (len <= max_segment) continue;
        const auto pieces = static_cast<std::size_t>(std::ceil(len / max_segment));
        for (std::size_t k = 1; k < pieces; ++k) {
            const double s = static_cast<double>(k) / static_cast<double>(pieces);
            split.vertices.push_back(curve.vertices[i] + s * (curve.vertices[next] - curve.vertices[i]));
            if (has_rho) split.density.push_back((1.0 - s) * curve.density[i] + s * curve.density[next]);
            if (has_det) split.jacobian_det.push_back((1.0 - s) * curve.jacobian_det[i] + s * curve.jacobian_det[next]);
        }
    }

    BoundaryCurve out;
    out.time = curve.time;
    const std::size_t m = split.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (!out.vertices.empty()) {
            if (norm(split.vertices[i] - out.vertices.back()) < min_segment) continue;
            if (i + 1 == m && norm(split.vertices[i] - out.vertices.front()) < min_segment) continue;
        }
        out.vertices.push_back(split.vertices[i]);
        if (has_rho) out.density.push_back(split.density[i]);
        if (has_det) out.jacobian_det.push_back(split.jacobian_det[i]);
    }
    if (out.size() < 8) throw GeometryError("resampling would leave fewer than 8 vertices");
    return out;
}

BoundaryCurve BoundaryTrajectory::curve(std::size_t node) const
{
    BoundaryCurve c;
    c.time = static_cast<double>(node) * dt;
    const std::size_t n = n_vertices();
    c.vertices.resize(n);
    c.density.resize(n);
    c.jacobian_det.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.vertices[i] = traces[i].positions[node];
        c.density[i] = traces[i].density[node];
        c.jacobian_det[i] = traces[i].jacobian_det[node];
    }
    return c;
}

std::vector<Characteristic> trace_boundary(const ProblemInstance& problem, const ControlSignal& signal,
                                           std::span<const double> params, Exec exec)
{
    std::vector<Characteristic> traces(params.size());
    for_each_index(exec, params.size(), [&](std::size_t i) {
        traces[i] = trace_characteristic(problem.field, signal, problem.density, problem.target.point_at(params[i]),
                                         Direction::backward_from_end, problem.integrator);
    });
    return traces;
}

namespace {

// Longest length reached by segment (i, i+1) over all nodes.
std::vector<double> max_segment_lengths(const std::vector<Characteristic>& traces)
{
    const std::size_t n = traces.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = traces[i].positions;
        const auto& b = traces[(i + 1) % n].positions;
        double longest = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) longest = std::max(longest, norm_sq(b[j] - a[j]));
        out[i] = std::sqrt(longest);
    }
    return out;
}

}  // namespace

BoundaryTrajectory trace_target(const ProblemInstance& problem, const ControlSignal& signal, Exec exec)
{
    if (signal.n_steps() != problem.n_time_steps || signal.dim() != problem.controls.dim()) {
        throw std::invalid_argument("control signal does not match the problem discretization");
    }
    const std::size_t n0 = problem.n_boundary_pts;
    constexpr double two_pi = 2.0 * std::numbers::pi;

    BoundaryTrajectory traj;
    traj.dt = signal.dt();
    traj.params.resize(n0);
    for (std::size_t k = 0; k < n0; ++k) traj.params[k] = two_pi * static_cast<double>(k) / static_cast<double>(n0);
    traj.traces = trace_boundary(problem, signal, traj.params, exec);

    const auto& opts = problem.resample;
    if (!opts.enabled) return traj;

    const auto initial = problem.target.sample(n0);
    double perimeter = 0.0;
    for (std::size_t k = 0; k < n0; ++k) perimeter += norm(initial[(k + 1) % n0] - initial[k]);
    const double max_segment = opts.max_factor * perimeter / static_cast<double>(n0);
    const std::size_t cap = opts.max_vertex_factor * n0;

    for (std::size_t round = 0; round < opts.max_rounds; ++round) {
        const std::size_t n = traj.n_vertices();
        if (n >= cap) break;
        const auto lengths = max_segment_lengths(traj.traces);
        std::vector<std::size_t> split;
        for (std::size_t i = 0; i < n; ++i) {
            if (lengths[i] > max_segment) split.push_back(i);
        }
        if (split.empty()) break;
        if (n + split.size() > cap) {
            std::stable_sort(split.begin(), split.end(),
                             [&](std::size_t a, std::size_t b) { return lengths[a] > lengths[b]; });
            split.resize(cap - n);
            std::sort(split.begin(), split.end());
        }

        std::vector<double> new_params(split.size());
        for (std::size_t k = 0; k < split.size(); ++k) {
            const std::size_t i = split[k];
            const double next = i + 1 < n ? traj.params[i + 1] : two_pi;
            new_params[k] = 0.5 * (traj.params[i] + next);
        }
        auto new_traces = trace_boundary(problem, signal, new_params, exec);

        BoundaryTrajectory merged;
        merged.dt = traj.dt;
        merged.params.reserve(n + split.size());
        merged.traces.reserve(n + split.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            merged.params.push_back(traj.params[i]);
            merged.traces.push_back(std::move(traj.traces[i]));
            if (k < split.size() && split[k] == i) {
                merged.params.push_back(new_params[k]);
                merged.traces.push_back(std::move(new_traces[k]));
                ++k;
            }
        }
        traj = std::move(merged);
    }
    return traj;
}

}  // namespace lvc
