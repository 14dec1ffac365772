#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lvc/exec.hpp"
#include "lvc/flow.hpp"
#include "lvc/geometry.hpp"
#include "lvc/problem.hpp"

namespace lvc {

/// Closed counterclockwise polygon sampling the boundary of A^t, with the density and
/// flow Jacobian carried by each vertex.
struct BoundaryCurve {
    double time = 0.0;
    std::vector<Vec2> vertices;
    std::vector<double> density;
    std::vector<double> jacobian_det;

    std::size_t size() const { return vertices.size(); }
};

/// Shoelace area; positive for counterclockwise polygons.
double signed_area(std::span<const Vec2> vertices);

/// Unit normal at each vertex: the central-difference tangent (x_{i+1} - x_{i-1}) / 2
/// rotated by -pi/2 and normalized. Throws GeometryError on coincident neighbours or a
/// non-positive area.
std::vector<Vec2> outward_normals(const BoundaryCurve& curve);

/// Quadrature weights paired with outward_normals: w_i = |x_{i+1} - x_{i-1}| / 2.
/// With these weights sum_i n_i w_i vanishes for every closed polygon and
/// sum_i (x_i . n_i) w_i equals twice the polygon area.
std::vector<double> boundary_weights(const BoundaryCurve& curve);

/// sum_i rho_i (v(t, x_i, omega) . n_i) w_i
double hamiltonian_integral(const BoundaryCurve& curve, const ControlAffineField& field, double t,
                            ControlView omega);

/// Decomposition H(omega) = c[0] + sum_i c[i+1] phi_i(t, omega), where c[0] is the drift
/// flux and c[i+1] the flux of channel i.
std::vector<double> hamiltonian_coefficients(const BoundaryCurve& curve, const ControlAffineField& field,
                                             double t);

/// Mass of rho0 enclosed by a counterclockwise curve, as the line integral of F dx2 where
/// dF/dx1 = rho0 (Green), midpoint rule per segment. F is the density's tail-anchored
/// antiderivative on the side of the density center where the curve lies.
double stokes_mass(const BoundaryCurve& curve, const InitialDensity& density);

/// Splits segments longer than max_segment into equal pieces (payload interpolated
/// linearly) and then drops vertices closer than min_segment to the previous kept one.
/// Throws GeometryError if fewer than 8 vertices would remain.
BoundaryCurve resample(const BoundaryCurve& curve, double max_segment, double min_segment);

/// Boundary of A^t for every grid node, stored per vertex as traced characteristics.
struct BoundaryTrajectory {
    std::vector<double> params;  // target parameter of each vertex (angle in [0, 2 pi))
    std::vector<Characteristic> traces;
    double dt = 0.0;

    std::size_t n_vertices() const { return traces.size(); }
    std::size_t n_nodes() const { return traces.empty() ? 0 : traces.front().positions.size(); }
    BoundaryCurve curve(std::size_t node) const;
};

/// Backward traces of the target boundary at the given parameters (one per vertex).
std::vector<Characteristic> trace_boundary(const ProblemInstance& problem, const ControlSignal& signal,
                                           std::span<const double> params, Exec exec);

/// Samples the target with n_boundary_pts vertices and traces them backward. With
/// resampling enabled, segments whose length exceeds max_factor times the initial mean
/// at any node are bisected in target parameter and the new vertices traced, so every
/// vertex remains an exact characteristic.
BoundaryTrajectory trace_target(const ProblemInstance& problem, const ControlSignal& signal, Exec exec);

}  // namespace lvc
