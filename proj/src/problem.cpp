#include "lvc/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lvc/errors.hpp"
#include "lvc/format.hpp"

namespace lvc {

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(std::string_view key, std::string_view text)
{
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError("invalid numeric value '" + std::string(text) + "' for key '" + std::string(key) + "'");
    }
    return value;
}

// ---------------------------------------------------------------------------
// ControlAffineField

ControlAffineField::ControlAffineField(VectorTerm drift, std::vector<VectorTerm> channels)
    : drift_(std::move(drift)), channels_(std::move(channels))
{
}

void ControlAffineField::set_channel_maps(std::vector<ChannelMap> maps)
{
    if (!maps.empty() && maps.size() != channels_.size()) {
        throw ConfigError("channel map count must equal channel count");
    }
    maps_ = std::move(maps);
}

void ControlAffineField::set_analytic_divergence(ScalarTerm drift_div, std::vector<ScalarTerm> channel_divs)
{
    if (channel_divs.size() != channels_.size()) {
        throw ConfigError("one divergence per channel is required");
    }
    drift_div_ = std::move(drift_div);
    channel_divs_ = std::move(channel_divs);
}

void ControlAffineField::set_divergence(DivergenceFn div) { div_override_ = std::move(div); }

void ControlAffineField::set_fd_step(double h)
{
    if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
    fd_step_ = h;
}

double ControlAffineField::channel_coefficient(std::size_t i, double t, ControlView u) const
{
    return maps_.empty() ? u[i] : maps_[i](t, u);
}

Vec2 ControlAffineField::value(double t, Vec2 x, ControlView u) const
{
    Vec2 v = drift_(t, x);
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        const double phi = channel_coefficient(i, t, u);
        // Inactive channels are skipped; bang-bang controls switch most of them off.
        if (phi != 0.0) v += phi * channels_[i](t, x);
    }
    return v;
}

double ControlAffineField::divergence(double t, Vec2 x, ControlView u) const
{
    if (div_override_) return div_override_(t, x, u);
    if (!drift_div_) return fd_divergence(t, x, u);
    double d = drift_div_(t, x);
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        const double phi = channel_coefficient(i, t, u);
        if (phi != 0.0) d += phi * channel_divs_[i](t, x);
    }
    return d;
}

double ControlAffineField::fd_divergence(double t, Vec2 x, ControlView u) const
{
    const double h = fd_step_;
    const Vec2 e1{h, 0.0};
    const Vec2 e2{0.0, h};
    const double d1 = value(t, x + e1, u).x1 - value(t, x - e1, u).x1;
    const double d2 = value(t, x + e2, u).x2 - value(t, x - e2, u).x2;
    return (d1 + d2) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// ControlSet

ControlSet ControlSet::box(Control lo, Control hi)
{
    if (lo.empty() || lo.size() != hi.size()) throw ConfigError("box bounds must be non-empty and of equal size");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) throw ConfigError("box lower bound exceeds upper bound");
    }
    return ControlSet(BoxSet{std::move(lo), std::move(hi)});
}

ControlSet ControlSet::ball(Control center, double radius)
{
    if (center.empty()) throw ConfigError("ball center must be non-empty");
    if (!(radius >= 0.0)) throw ConfigError("ball radius must be non-negative");
    return ControlSet(BallSet{std::move(center), radius});
}

ControlSet ControlSet::simplex(std::size_t m)
{
    if (m == 0) throw ConfigError("simplex dimension must be positive");
    return ControlSet(SimplexSet{m});
}

std::size_t ControlSet::dim() const
{
    return std::visit(
        [](const auto& s) -> std::size_t {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, BoxSet>) return s.lo.size();
            else if constexpr (std::is_same_v<S, BallSet>) return s.center.size();
            else return s.m;
        },
        set_);
}

bool ControlSet::contains(ControlView w, double tol) const
{
    if (w.size() != dim()) return false;
    return std::visit(
        [&](const auto& s) -> bool {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, BoxSet>) {
                for (std::size_t i = 0; i < w.size(); ++i) {
                    if (w[i] < s.lo[i] - tol || w[i] > s.hi[i] + tol) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<S, BallSet>) {
                double r2 = 0.0;
                for (std::size_t i = 0; i < w.size(); ++i) r2 += (w[i] - s.center[i]) * (w[i] - s.center[i]);
                return std::sqrt(r2) <= s.radius + tol;
            } else {
                double sum = 0.0;
                for (double wi : w) {
                    if (wi < -tol || wi > 1.0 + tol) return false;
                    sum += wi;
                }
                return std::abs(sum - 1.0) <= tol;
            }
        },
        set_);
}

Control ControlSet::linear_argmin(std::span<const double> c) const
{
    if (c.size() != dim()) throw std::invalid_argument("cost vector dimension mismatch");
    return std::visit(
        [&](const auto& s) -> Control {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, BoxSet>) {
                Control w(c.size());
                for (std::size_t i = 0; i < c.size(); ++i) w[i] = c[i] < 0.0 ? s.hi[i] : s.lo[i];
                return w;
            } else if constexpr (std::is_same_v<S, BallSet>) {
                double n2 = 0.0;
                for (double ci : c) n2 += ci * ci;
                Control w = s.center;
                if (n2 == 0.0) return w;
                const double scale = s.radius / std::sqrt(n2);
                for (std::size_t i = 0; i < c.size(); ++i) w[i] -= scale * c[i];
                return w;
            } else {
                const auto j = static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin());
                Control w(s.m, 0.0);
                w[j] = 1.0;
                return w;
            }
        },
        set_);
}

std::string ControlSet::describe() const
{
    std::ostringstream os;
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            auto list = [&](const Control& v) {
                os << '(';
                for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_number(v[i]);
                os << ')';
            };
            if constexpr (std::is_same_v<S, BoxSet>) {
                os << "box lo=";
                list(s.lo);
                os << " hi=";
                list(s.hi);
            } else if constexpr (std::is_same_v<S, BallSet>) {
                os << "ball center=";
                list(s.center);
                os << " radius=" << format_number(s.radius);
            } else {
                os << "simplex m=" << s.m;
            }
        },
        set_);
    return os.str();
}

// ---------------------------------------------------------------------------
// InitialDensity

InitialDensity InitialDensity::gaussian(double sigma, Vec2 center)
{
    if (!(sigma > 0.0)) throw ConfigError("density.sigma must be positive");
    InitialDensity d;
    d.gaussian_ = GaussianDensity{sigma, center};
    d.center_ = center;
    d.scale_ = sigma;
    return d;
}

InitialDensity InitialDensity::custom(DensityFn rho, AntiderivativeFn antiderivative, Vec2 center, double scale)
{
    if (!rho) throw ConfigError("custom density requires an evaluator");
    if (!(scale > 0.0)) throw ConfigError("custom density scale must be positive");
    InitialDensity d;
    d.rho_ = std::move(rho);
    d.antiderivative_ = std::move(antiderivative);
    d.center_ = center;
    d.scale_ = scale;
    return d;
}

double InitialDensity::operator()(Vec2 x) const
{
    if (gaussian_) {
        const double s2 = gaussian_->sigma * gaussian_->sigma;
        const Vec2 r = x - gaussian_->center;
        return std::exp(-norm_sq(r) / (2.0 * s2)) / (2.0 * std::numbers::pi * s2);
    }
    return rho_(x);
}

double InitialDensity::partial_antiderivative(double x1, double x2) const
{
    if (gaussian_) {
        const double s = gaussian_->sigma;
        const double c1 = gaussian_->center.x1;
        const double c2 = gaussian_->center.x2;
        const double dy = x2 - c2;
        const double k = std::numbers::sqrt2 * s;
        // int_0^{x1} exp(-(xi-c1)^2 / 2s^2) dxi = s sqrt(pi/2) [erf((x1-c1)/k) - erf(-c1/k)]
        const double line = std::exp(-dy * dy / (2.0 * s * s)) / (2.0 * std::numbers::pi * s * s);
        return line * s * std::sqrt(std::numbers::pi / 2.0) * (std::erf((x1 - c1) / k) - std::erf(-c1 / k));
    }
    if (antiderivative_) return antiderivative_(x1, x2);
    if (x1 == 0.0) return 0.0;
    auto f = [&](double xi) { return rho_(Vec2{xi, x2}); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, x1, 12, 1e-13);
}

double InitialDensity::tail_antiderivative(double x1, double x2, bool lower) const
{
    if (!gaussian_) return partial_antiderivative(x1, x2);
    const double s = gaussian_->sigma;
    const double dy = x2 - gaussian_->center.x2;
    const double z = (x1 - gaussian_->center.x1) / (std::numbers::sqrt2 * s);
    const double line = std::exp(-dy * dy / (2.0 * s * s)) / (2.0 * std::numbers::pi * s * s);
    const double half_mass = line * s * std::sqrt(std::numbers::pi / 2.0);
    return lower ? half_mass * std::erfc(-z) : -half_mass * std::erfc(z);
}

// ---------------------------------------------------------------------------
// TargetSet

TargetSet TargetSet::circle(Vec2 center, double radius)
{
    if (!(radius > 0.0)) throw ConfigError("target.radius must be positive");
    return TargetSet(CircleTarget{center, radius});
}

TargetSet TargetSet::ellipse(Vec2 center, double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("target semi-axes must be positive");
    return TargetSet(EllipseTarget{center, a, b});
}

Vec2 TargetSet::point_at(double theta) const
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    if (const auto* circ = std::get_if<CircleTarget>(&shape_)) {
        return circ->center + Vec2{circ->radius * c, circ->radius * s};
    }
    const auto& e = std::get<EllipseTarget>(shape_);
    return e.center + Vec2{e.a * c, e.b * s};
}

std::vector<Vec2> TargetSet::sample(std::size_t n_pts) const
{
    std::vector<Vec2> pts(n_pts);
    for (std::size_t k = 0; k < n_pts; ++k) {
        pts[k] = point_at(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_pts));
    }
    return pts;
}

bool TargetSet::contains(Vec2 x) const
{
    if (const auto* circ = std::get_if<CircleTarget>(&shape_)) {
        return norm_sq(x - circ->center) <= circ->radius * circ->radius;
    }
    const auto& e = std::get<EllipseTarget>(shape_);
    const Vec2 r = x - e.center;
    return (r.x1 * r.x1) / (e.a * e.a) + (r.x2 * r.x2) / (e.b * e.b) <= 1.0;
}

double TargetSet::area() const
{
    if (const auto* circ = std::get_if<CircleTarget>(&shape_)) {
        return std::numbers::pi * circ->radius * circ->radius;
    }
    const auto& e = std::get<EllipseTarget>(shape_);
    return std::numbers::pi * e.a * e.b;
}

Vec2 TargetSet::center() const
{
    return std::visit([](const auto& s) { return s.center; }, shape_);
}

std::string TargetSet::describe() const
{
    std::ostringstream os;
    if (const auto* circ = std::get_if<CircleTarget>(&shape_)) {
        os << "circle center=(" << format_number(circ->center.x1) << ", " << format_number(circ->center.x2)
           << ") radius=" << format_number(circ->radius);
    } else {
        const auto& e = std::get<EllipseTarget>(shape_);
        os << "ellipse center=(" << format_number(e.center.x1) << ", " << format_number(e.center.x2)
           << ") a=" << format_number(e.a) << " b=" << format_number(e.b);
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// ProblemInstance

void ProblemInstance::validate() const
{
    if (!(horizon > 0.0)) throw ConfigError("problem.T must be positive");
    if (n_time_steps < 2) throw ConfigError("problem.n_time_steps must be at least 2");
    if (n_boundary_pts < 8) throw ConfigError("problem.n_boundary_pts must be at least 8");
    if (field.has_coordinate_maps() && field.num_channels() != controls.dim()) {
        throw ConfigError("channel count must equal the control dimension");
    }
    if (!initial_control.empty() && !controls.contains(initial_control)) {
        throw ConfigError("initial control is not admissible");
    }
}

// ---------------------------------------------------------------------------
// Benchmarks

namespace {

ParameterMap common_defaults(double horizon, Vec2 target_center)
{
    return {
        {"problem.T", format_number(horizon)},
        {"problem.n_time_steps", "1200"},
        {"problem.n_boundary_pts", "400"},
        {"problem.integrator", "euler"},
        {"problem.resample", "1"},
        {"density.sigma", "1"},
        {"density.center_x", "0"},
        {"density.center_y", "0"},
        {"target.center_x", format_number(target_center.x1)},
        {"target.center_y", format_number(target_center.x2)},
    };
}

ParameterMap defaults_for(std::string_view name)
{
    if (name == "boat") {
        auto p = common_defaults(12.0, {-3.0, 0.0});
        p["field.alpha"] = "0.5";
        p["field.beta"] = "0.5";
        p["control.u_max"] = "0.75";
        p["target.radius"] = "1";
        return p;
    }
    if (name == "pendulum") {
        auto p = common_defaults(6.0, {std::numbers::pi / 2.0, 0.0});
        p["control.u_max"] = "0.5";
        p["target.radius"] = "1";
        return p;
    }
    if (name == "sheep") {
        auto p = common_defaults(3.0, {0.0, 0.0});
        p["field.alpha"] = "1";
        p["field.beta"] = "5";
        p["field.R"] = "3";
        p["field.x0_x"] = "0";
        p["field.x0_y"] = "0";
        p["target.a"] = "2";
        p["target.b"] = "1.2";
        return p;
    }
    throw ConfigError("unknown benchmark '" + std::string(name) + "' (expected boat, pendulum or sheep)");
}

class Params {
public:
    explicit Params(const ParameterMap& p) : p_(p) {}

    double number(const std::string& key) const { return parse_number(key, p_.at(key)); }

    std::size_t count(const std::string& key) const
    {
        const double v = number(key);
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
            throw ConfigError("key '" + key + "' must be a non-negative integer");
        }
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string& key) const
    {
        const auto& v = p_.at(key);
        if (v == "1" || v == "true" || v == "on") return true;
        if (v == "0" || v == "false" || v == "off") return false;
        throw ConfigError("key '" + key + "' must be a boolean (0/1)");
    }

    const std::string& text(const std::string& key) const { return p_.at(key); }

private:
    const ParameterMap& p_;
};

void apply_common(ProblemInstance& prob, const Params& p)
{
    prob.horizon = p.number("problem.T");
    if (!(prob.horizon > 0.0)) throw ConfigError("problem.T must be positive");
    prob.n_time_steps = p.count("problem.n_time_steps");
    prob.n_boundary_pts = p.count("problem.n_boundary_pts");
    const auto& integrator = p.text("problem.integrator");
    if (integrator == "euler") prob.integrator = Integrator::euler;
    else if (integrator == "heun") prob.integrator = Integrator::heun;
    else throw ConfigError("problem.integrator must be 'euler' or 'heun'");
    prob.resample.enabled = p.flag("problem.resample");
    prob.density = InitialDensity::gaussian(p.number("density.sigma"),
                                            {p.number("density.center_x"), p.number("density.center_y")});
}

ProblemInstance build_boat(const Params& p)
{
    ProblemInstance prob;
    const double alpha = p.number("field.alpha");
    const double beta = p.number("field.beta");
    const double u_max = p.number("control.u_max");
    if (!(u_max >= 0.0)) throw ConfigError("control.u_max must be non-negative");
    prob.field = ControlAffineField(
        [alpha, beta](double, Vec2 x) { return Vec2{alpha + std::exp(-beta * x.x2 * x.x2), 0.0}; },
        {[](double, Vec2) { return Vec2{1.0, 0.0}; }, [](double, Vec2) { return Vec2{0.0, 1.0}; }});
    // The river speed depends on x2 only, so the field is divergence free.
    prob.field.set_analytic_divergence([](double, Vec2) { return 0.0; },
                                       {[](double, Vec2) { return 0.0; }, [](double, Vec2) { return 0.0; }});
    prob.controls = ControlSet::ball({0.0, 0.0}, u_max);
    prob.target = TargetSet::circle({p.number("target.center_x"), p.number("target.center_y")},
                                    p.number("target.radius"));
    prob.initial_control = {0.0, 0.0};
    return prob;
}

ProblemInstance build_pendulum(const Params& p)
{
    ProblemInstance prob;
    const double u_max = p.number("control.u_max");
    if (!(u_max >= 0.0)) throw ConfigError("control.u_max must be non-negative");
    prob.field = ControlAffineField([](double, Vec2 x) { return Vec2{x.x2, std::cos(x.x1)}; },
                                    {[](double, Vec2) { return Vec2{1.0, 0.0}; }});
    prob.field.set_analytic_divergence([](double, Vec2) { return 0.0; }, {[](double, Vec2) { return 0.0; }});
    prob.controls = ControlSet::box({-u_max}, {u_max});
    prob.target = TargetSet::circle({p.number("target.center_x"), p.number("target.center_y")},
                                    p.number("target.radius"));
    prob.initial_control = {0.0};
    return prob;
}

constexpr std::size_t kSheepRepellers = 6;

ProblemInstance build_sheep(const Params& p)
{
    ProblemInstance prob;
    const double alpha = p.number("field.alpha");
    const double beta = p.number("field.beta");
    const double ring = p.number("field.R");
    const Vec2 x0{p.number("field.x0_x"), p.number("field.x0_y")};

    std::vector<VectorTerm> channels;
    std::vector<ScalarTerm> channel_divs;
    for (std::size_t k = 0; k < kSheepRepellers; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(kSheepRepellers);
        const Vec2 xk{ring * std::cos(angle), ring * std::sin(angle)};
        channels.push_back([beta, xk](double, Vec2 x) {
            const Vec2 r = x - xk;
            const double s = norm_sq(r);
            return beta * std::exp(-s * s) * r;
        });
        // div(r g(s)) = 2g + 2s g'(s) with g = beta exp(-s^2)
        channel_divs.push_back([beta, xk](double, Vec2 x) {
            const double s = norm_sq(x - xk);
            return beta * std::exp(-s * s) * (2.0 - 4.0 * s * s);
        });
    }
    prob.field = ControlAffineField(
        [alpha, x0](double, Vec2 x) {
            const Vec2 r = x - x0;
            return (alpha / std::sqrt(1.0 + norm_sq(r))) * r;
        },
        std::move(channels));
    prob.field.set_analytic_divergence(
        [alpha, x0](double, Vec2 x) {
            const double s = norm_sq(x - x0);
            return alpha * (2.0 + s) / std::pow(1.0 + s, 1.5);
        },
        std::move(channel_divs));
    prob.controls = ControlSet::simplex(kSheepRepellers);
    prob.target = TargetSet::ellipse({p.number("target.center_x"), p.number("target.center_y")},
                                     p.number("target.a"), p.number("target.b"));
    prob.initial_control = Control(kSheepRepellers, 1.0 / static_cast<double>(kSheepRepellers));
    return prob;
}

}  // namespace

std::vector<std::string> benchmark_names() { return {"boat", "pendulum", "sheep"}; }

ProblemInstance make_benchmark(std::string_view name, const ParameterMap& overrides)
{
    ParameterMap params = defaults_for(name);
    for (const auto& [key, value] : overrides) {
        if (key == "problem.name") {
            if (value != name) throw ConfigError("problem.name '" + value + "' conflicts with benchmark '" + std::string(name) + "'");
            continue;
        }
        if (name == "sheep" && (key == "m" || key == "control.m" || key == "field.m")) {
            throw ConfigError("key '" + key + "': the sheep benchmark fixes m = 6 repellers");
        }
        auto it = params.find(key);
        if (it == params.end()) {
            throw ConfigError("unknown configuration key '" + key + "' for benchmark '" + std::string(name) + "'");
        }
        it->second = value;
    }

    const Params p(params);
    ProblemInstance prob;
    if (name == "boat") prob = build_boat(p);
    else if (name == "pendulum") prob = build_pendulum(p);
    else prob = build_sheep(p);

    apply_common(prob, p);
    prob.name = std::string(name);
    params["problem.name"] = prob.name;
    prob.parameters = std::move(params);
    prob.validate();
    return prob;
}

ParameterMap parse_config_text(std::string_view text)
{
    ParameterMap out;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!out.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

ProblemInstance load_problem_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    ParameterMap params = parse_config_text(buf.str());
    const auto it = params.find("problem.name");
    if (it == params.end()) throw ConfigError("configuration is missing 'problem.name'");
    const std::string name = it->second;
    params.erase(it);
    return make_benchmark(name, params);
}

}  // namespace lvc
