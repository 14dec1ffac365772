#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "lvc/errors.hpp"
#include "lvc/problem.hpp"
#include "support/oracles.hpp"

using namespace lvc;

namespace {

Vec2 random_point(std::mt19937_64& rng, double half)
{
    std::uniform_real_distribution<double> d(-half, half);
    return {d(rng), d(rng)};
}

}  // namespace

TEST_CASE("benchmark drifts match their defining formulas")
{
    const auto pendulum = make_benchmark("pendulum");
    const Vec2 v = pendulum.field.drift(0.7, {0.0, 1.0});
    CHECK(v.x1 == 1.0);
    CHECK(v.x2 == 1.0);

    const auto boat = make_benchmark("boat");
    const Vec2 b = boat.field.drift(3.0, {5.0, 0.0});
    CHECK(b.x1 == 1.5);
    CHECK(b.x2 == 0.0);
    CHECK(boat.horizon == 12.0);
    CHECK(boat.target.center().x1 == -3.0);

    const auto sheep = make_benchmark("sheep");
    CHECK(sheep.field.num_channels() == 6);
    CHECK(sheep.controls.dim() == 6);
    CHECK(sheep.horizon == 3.0);
    CHECK(sheep.parameters.at("field.alpha") == "1");
    CHECK(sheep.parameters.at("field.beta") == "5");
    CHECK(sheep.parameters.at("field.R") == "3");
}

TEST_CASE("benchmark overrides are validated")
{
    CHECK_THROWS_AS(make_benchmark("sheep", {{"m", "1"}}), ConfigError);
    CHECK_THROWS_AS(make_benchmark("sheep", {{"control.m", "1"}}), ConfigError);
    CHECK_THROWS_AS(make_benchmark("unicorn"), ConfigError);
    CHECK_THROWS_AS(make_benchmark("boat", {{"field.gamma", "1"}}), ConfigError);
    CHECK_THROWS_AS(make_benchmark("boat", {{"density.sigma", "0"}}), ConfigError);
    CHECK_THROWS_AS(make_benchmark("boat", {{"problem.T", "-1"}}), ConfigError);
    CHECK_THROWS_AS(make_benchmark("pendulum", {{"target.radius", "0"}}), ConfigError);
    CHECK_THROWS_AS(make_benchmark("pendulum", {{"problem.n_time_steps", "1"}}), ConfigError);
    CHECK_THROWS_AS(make_benchmark("pendulum", {{"problem.T", "abc"}}), ConfigError);

    try {
        make_benchmark("boat", {{"field.gamma", "1"}});
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("field.gamma") != std::string::npos);
    }

    const auto boat = make_benchmark("boat", {{"field.alpha", "0.25"}});
    CHECK(boat.field.drift(0.0, {0.0, 0.0}).x1 == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(boat.parameters.at("field.alpha") == "0.25");
}

TEST_CASE("fields are affine in the control")
{
    std::mt19937_64 rng(11);
    for (const auto& name : benchmark_names()) {
        const auto p = make_benchmark(name);
        for (int k = 0; k < 200; ++k) {
            const Control u = testing::random_feasible(p.controls, rng);
            const Control w = testing::random_feasible(p.controls, rng);
            Control mid(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) mid[i] = 0.5 * (u[i] + w[i]);
            const Vec2 x = random_point(rng, 4.0);
            const Vec2 vm = p.field.value(0.3, x, mid);
            const Vec2 avg = 0.5 * (p.field.value(0.3, x, u) + p.field.value(0.3, x, w));
            CHECK(norm(vm - avg) <= 1e-14 * (1.0 + norm(avg)));

            // Direct evaluation hook: drift plus weighted channels.
            Vec2 direct = p.field.drift(0.3, x);
            for (std::size_t i = 0; i < u.size(); ++i) direct += u[i] * p.field.channel(i, 0.3, x);
            CHECK(norm(p.field.value(0.3, x, u) - direct) <= 1e-14 * (1.0 + norm(direct)));
        }
    }
}

TEST_CASE("analytic divergences agree with central differences")
{
    std::mt19937_64 rng(5);
    for (const auto& name : benchmark_names()) {
        auto p = make_benchmark(name);
        for (int k = 0; k < 100; ++k) {
            const Control u = testing::random_feasible(p.controls, rng);
            const Vec2 x = random_point(rng, 4.0);
            const double exact = p.field.divergence(0.0, x, u);
            double previous = 0.0;
            for (double h : {1e-2, 5e-3}) {
                p.field.set_fd_step(h);
                const double err = std::abs(p.field.fd_divergence(0.0, x, u) - exact);
                // Second order: halving h cuts the error about fourfold.
                if (h == 5e-3 && previous > 1e-9) CHECK(err < 0.35 * previous);
                CHECK(err <= 50.0 * h * h * (1.0 + std::abs(exact)));
                previous = err;
            }
        }
    }
}

TEST_CASE("benchmarks satisfy a linear growth bound on a 10 sigma box")
{
    std::mt19937_64 rng(3);
    for (const auto& name : benchmark_names()) {
        const auto p = make_benchmark(name);
        double c = 0.0;
        for (int k = 0; k < 5000; ++k) {
            const Vec2 x = random_point(rng, 10.0);
            const Control u = testing::random_feasible(p.controls, rng);
            c = std::max(c, norm(p.field.value(0.0, x, u)) / (1.0 + norm(x)));
        }
        CHECK(std::isfinite(c));
        CHECK(c < 10.0);
    }
}

TEST_CASE("gaussian density is normalized and its antiderivative is consistent")
{
    for (const Vec2 center : {Vec2{0.0, 0.0}, Vec2{0.7, -1.3}}) {
        for (double sigma : {1.0, 0.6}) {
            const auto rho = InitialDensity::gaussian(sigma, center);
            const double total = testing::box_quadrature([&](Vec2 x) { return rho(x); },
                                                         [](Vec2) { return true; }, center, 6.0 * sigma, 600);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

            for (const Vec2 x : {Vec2{0.3, 0.2}, Vec2{-1.1, 0.8}, Vec2{2.0, -0.4}}) {
                const double h = 1e-4;
                const double d = (rho.partial_antiderivative(x.x1 + h, x.x2) - rho.partial_antiderivative(x.x1 - h, x.x2)) /
                                 (2.0 * h);
                CHECK(std::abs(d - rho(x)) <= 1e-6 * rho(x));
                CHECK(rho(x) >= 0.0);
                // Tail anchors differ from the 0 anchor by a function of x2 only.
                const double lo = rho.tail_antiderivative(x.x1, x.x2, true) - rho.partial_antiderivative(x.x1, x.x2);
                const double lo2 = rho.tail_antiderivative(x.x1 + 0.5, x.x2, true) -
                                   rho.partial_antiderivative(x.x1 + 0.5, x.x2);
                CHECK(lo == doctest::Approx(lo2).epsilon(1e-12));
                const double span = rho.tail_antiderivative(x.x1, x.x2, true) - rho.tail_antiderivative(x.x1, x.x2, false);
                const double line = std::exp(-(x.x2 - center.x2) * (x.x2 - center.x2) / (2 * sigma * sigma)) /
                                    (std::sqrt(2.0 * std::numbers::pi) * sigma);
                CHECK(span == doctest::Approx(line).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("custom density falls back to quadrature for its antiderivative")
{
    const auto rho = InitialDensity::custom([](Vec2 x) { return std::exp(-x.x1 * x.x1) * (1.0 + x.x2 * x.x2); });
    const double x1 = 1.3;
    const double x2 = 0.5;
    const double exact = std::sqrt(std::numbers::pi) / 2.0 * std::erf(x1) * (1.0 + x2 * x2);
    CHECK(rho.partial_antiderivative(x1, x2) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(rho.partial_antiderivative(-x1, x2) == doctest::Approx(-exact).epsilon(1e-12));
    CHECK(rho.tail_antiderivative(x1, x2, true) == rho.partial_antiderivative(x1, x2));
}

TEST_CASE("sampled targets are counterclockwise and converge in area")
{
    const std::vector<TargetSet> targets{TargetSet::circle({-3.0, 0.0}, 1.0), TargetSet::ellipse({0.0, 0.0}, 2.0, 1.2),
                                         TargetSet::circle({1.0, 2.0}, 0.3)};
    for (const auto& target : targets) {
        for (std::size_t n : {8u, 32u, 400u, 1000u}) {
            const auto pts = target.sample(n);
            REQUIRE(pts.size() == n);
            double twice = 0.0;
            for (std::size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
            const double area = 0.5 * twice;
            CHECK(area > 0.0);
            CHECK(std::abs(area - target.area()) / target.area() <= 10.0 / double(n * n));
        }
        CHECK(target.contains(target.center()));
    }
    const auto pts = TargetSet::circle({-3.0, 0.0}, 1.0).sample(400);
    for (const auto& x : pts) CHECK(std::abs(norm(x - Vec2{-3.0, 0.0}) - 1.0) <= 1e-12);
    const auto e = TargetSet::ellipse({0.0, 0.0}, 2.0, 1.2).point_at(0.0);
    CHECK(e.x1 == 2.0);
    CHECK(e.x2 == 0.0);
}

TEST_CASE("control sets: membership and closed-form argmin examples")
{
    const auto simplex = ControlSet::simplex(3);
    const std::vector<double> c1{3.0, 1.0, 2.0};
    CHECK(simplex.linear_argmin(c1) == Control{0.0, 1.0, 0.0});
    const std::vector<double> zero3{0.0, 0.0, 0.0};
    CHECK(simplex.linear_argmin(zero3) == Control{1.0, 0.0, 0.0});

    const auto ball = ControlSet::ball({0.0, 0.0}, 0.75);
    const std::vector<double> c2{1.0, 0.0};
    CHECK(ball.linear_argmin(c2) == Control{-0.75, 0.0});
    const std::vector<double> zero2{0.0, 0.0};
    CHECK(ball.linear_argmin(zero2) == Control{0.0, 0.0});

    const auto box = ControlSet::box({-0.5}, {0.5});
    const std::vector<double> c3{-2.0};
    CHECK(box.linear_argmin(c3) == Control{0.5});
    const std::vector<double> zero1{0.0};
    CHECK(box.linear_argmin(zero1) == Control{-0.5});

    CHECK(ball.contains(Control{0.75, 0.0}));
    CHECK_FALSE(ball.contains(Control{0.76, 0.0}));
    CHECK(simplex.contains(Control{0.2, 0.3, 0.5}));
    CHECK_FALSE(simplex.contains(Control{0.2, 0.3, 0.6}));
    CHECK_FALSE(box.contains(Control{0.6}));
    CHECK_THROWS_AS(ControlSet::box({1.0}, {0.0}), ConfigError);
    CHECK_THROWS_AS(ControlSet::ball({0.0}, -1.0), ConfigError);
}

TEST_CASE("configuration files")
{
    const auto params = parse_config_text("# comment\nproblem.name = boat\nfield.alpha = 0.4  # trailing\n\n");
    CHECK(params.at("problem.name") == "boat");
    CHECK(params.at("field.alpha") == "0.4");
    CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);

    const auto dir = std::filesystem::temp_directory_path() / "lvc_test_problem";
    std::filesystem::create_directories(dir);
    const auto path = dir / "pendulum.cfg";
    std::ofstream(path) << "problem.name = pendulum\nproblem.T = 3\ncontrol.u_max = 0.25\n";
    const auto p = load_problem_config(path);
    CHECK(p.name == "pendulum");
    CHECK(p.horizon == 3.0);
    CHECK(p.controls.contains(Control{0.25}));
    CHECK_FALSE(p.controls.contains(Control{0.3}));

    std::ofstream(path) << "problem.name = pendulum\nbogus.key = 1\n";
    CHECK_THROWS_AS(load_problem_config(path), ConfigError);
    std::ofstream(path) << "problem.T = 1\n";
    CHECK_THROWS_AS(load_problem_config(path), ConfigError);
}
