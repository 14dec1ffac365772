#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lvc/geometry.hpp"

namespace lvc {

using Control = std::vector<double>;
using ControlView = std::span<const double>;

using VectorTerm = std::function<Vec2(double t, Vec2 x)>;
using ScalarTerm = std::function<double(double t, Vec2 x)>;
using ChannelMap = std::function<double(double t, ControlView u)>;
using DivergenceFn = std::function<double(double t, Vec2 x, ControlView u)>;

/// Vector field of the form v(t,x,u) = v0(t,x) + sum_i phi_i(t,u) v_i(t,x).
///
/// Channel maps default to coordinate projections phi_i(t,u) = u_i. The divergence is
/// analytic when the caller supplies per-term divergences (or a full override), and a
/// central difference with step fd_step() otherwise.
class ControlAffineField {
public:
    ControlAffineField() = default;
    ControlAffineField(VectorTerm drift, std::vector<VectorTerm> channels);

    /// Replaces the coordinate projections. Must supply one map per channel.
    void set_channel_maps(std::vector<ChannelMap> maps);
    void set_analytic_divergence(ScalarTerm drift_div, std::vector<ScalarTerm> channel_divs);
    void set_divergence(DivergenceFn div);
    void set_fd_step(double h);

    std::size_t num_channels() const { return channels_.size(); }
    bool has_coordinate_maps() const { return maps_.empty(); }
    bool has_analytic_divergence() const { return static_cast<bool>(div_override_) || static_cast<bool>(drift_div_); }
    double fd_step() const { return fd_step_; }

    double channel_coefficient(std::size_t i, double t, ControlView u) const;
    Vec2 drift(double t, Vec2 x) const { return drift_(t, x); }
    Vec2 channel(std::size_t i, double t, Vec2 x) const { return channels_[i](t, x); }

    Vec2 value(double t, Vec2 x, ControlView u) const;
    double divergence(double t, Vec2 x, ControlView u) const;
    double fd_divergence(double t, Vec2 x, ControlView u) const;

private:
    VectorTerm drift_;
    std::vector<VectorTerm> channels_;
    std::vector<ChannelMap> maps_;
    ScalarTerm drift_div_;
    std::vector<ScalarTerm> channel_divs_;
    DivergenceFn div_override_;
    double fd_step_ = 1e-5;
};

struct BoxSet {
    Control lo;
    Control hi;
};

struct BallSet {
    Control center;
    double radius = 0.0;
};

struct SimplexSet {
    std::size_t m = 0;
};

/// Compact admissible control set U with a closed-form linear minimization oracle.
class ControlSet {
public:
    using Variant = std::variant<BoxSet, BallSet, SimplexSet>;

    static ControlSet box(Control lo, Control hi);
    static ControlSet ball(Control center, double radius);
    static ControlSet simplex(std::size_t m);

    std::size_t dim() const;
    const Variant& variant() const { return set_; }

    /// Membership with the per-variant tolerance (Box exact bounds plus tol, Ball
    /// radius + tol, Simplex sum within tol).
    bool contains(ControlView w, double tol = 1e-12) const;

    /// argmin of <c, w> over the set. Ties resolve to the earliest index / lower bound.
    Control linear_argmin(std::span<const double> c) const;

    std::string describe() const;

private:
    explicit ControlSet(Variant v) : set_(std::move(v)) {}
    Variant set_;
};

using DensityFn = std::function<double(Vec2 x)>;
using AntiderivativeFn = std::function<double(double x1, double x2)>;

struct GaussianDensity {
    double sigma = 1.0;
    Vec2 center{};
};

/// Initial density rho0 together with its partial antiderivative
/// F(x1, x2) = int_0^{x1} rho0(xi, x2) dxi.
class InitialDensity {
public:
    static InitialDensity gaussian(double sigma, Vec2 center = {});
    /// Arbitrary density. Without an antiderivative, F is evaluated by adaptive
    /// Gauss-Kronrod quadrature. `scale` sets the extent used by grid quadrature.
    static InitialDensity custom(DensityFn rho, AntiderivativeFn antiderivative = {},
                                 Vec2 center = {}, double scale = 1.0);

    double operator()(Vec2 x) const;
    double partial_antiderivative(double x1, double x2) const;

    /// Antiderivative in x1 anchored at one of the x1 tails instead of at 0:
    /// int_{-inf}^{x1} rho0 dxi (lower) or -int_{x1}^{inf} rho0 dxi (upper). Both differ from
    /// partial_antiderivative by a function of x2 alone, so their closed line integrals
    /// agree, but they keep full relative precision far out in the tails. Only Gaussian
    /// densities have them; custom densities fall back to partial_antiderivative.
    double tail_antiderivative(double x1, double x2, bool lower) const;

    const std::optional<GaussianDensity>& gaussian_params() const { return gaussian_; }
    Vec2 center() const { return center_; }
    double scale() const { return scale_; }

private:
    std::optional<GaussianDensity> gaussian_;
    DensityFn rho_;
    AntiderivativeFn antiderivative_;
    Vec2 center_{};
    double scale_ = 1.0;
};

struct CircleTarget {
    Vec2 center{};
    double radius = 1.0;
};

struct EllipseTarget {
    Vec2 center{};
    double a = 1.0;
    double b = 1.0;
};

/// Target set A: circle or axis-aligned ellipse, parametrized counterclockwise.
class TargetSet {
public:
    using Variant = std::variant<CircleTarget, EllipseTarget>;

    static TargetSet circle(Vec2 center, double radius);
    static TargetSet ellipse(Vec2 center, double a, double b);

    Vec2 point_at(double theta) const;
    std::vector<Vec2> sample(std::size_t n_pts) const;
    bool contains(Vec2 x) const;
    double area() const;
    Vec2 center() const;
    const Variant& variant() const { return shape_; }
    std::string describe() const;

private:
    explicit TargetSet(Variant v) : shape_(std::move(v)) {}
    Variant shape_;
};

enum class Integrator { euler, heun };

/// Adaptive refinement of the target sampling, applied before the final backward trace.
struct ResampleOptions {
    bool enabled = true;
    double max_factor = 4.0;   // max_segment = max_factor * initial mean segment
    double min_factor = 0.25;  // min_segment = min_factor * initial mean segment
    std::size_t max_rounds = 8;
    std::size_t max_vertex_factor = 8;  // vertex cap = factor * n_boundary_pts
};

using ParameterMap = std::map<std::string, std::string>;

struct ProblemInstance {
    std::string name;
    ControlAffineField field;
    ControlSet controls = ControlSet::simplex(1);
    InitialDensity density = InitialDensity::gaussian(1.0);
    TargetSet target = TargetSet::circle({}, 1.0);
    double horizon = 1.0;
    std::size_t n_time_steps = 1200;
    std::size_t n_boundary_pts = 400;
    Integrator integrator = Integrator::euler;
    ResampleOptions resample;
    /// Default starting control for the benchmark.
    Control initial_control;
    /// Every effective parameter, as key = value, for self-describing outputs.
    ParameterMap parameters;

    double dt() const { return horizon / static_cast<double>(n_time_steps); }
    double time(std::size_t node) const { return static_cast<double>(node) * dt(); }

    /// Throws ConfigError when an invariant of the instance is broken.
    void validate() const;
};

/// Built-in benchmarks: "boat", "pendulum", "sheep". Overrides use the dotted
/// configuration keys (e.g. "field.alpha", "problem.T"); unknown keys throw ConfigError.
ProblemInstance make_benchmark(std::string_view name, const ParameterMap& overrides = {});

/// Parses `key = value` lines. '#' starts a comment. Duplicate keys are an error.
ParameterMap parse_config_text(std::string_view text);

/// Reads a configuration file; `problem.name` selects the benchmark and the remaining
/// keys override its parameters.
ProblemInstance load_problem_config(const std::filesystem::path& path);

std::vector<std::string> benchmark_names();

}  // namespace lvc
