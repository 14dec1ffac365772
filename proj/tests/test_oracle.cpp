#include <doctest.h>

#include <cmath>

#include "lvc/oracle.hpp"
#include "lvc/problem.hpp"
#include "support/oracles.hpp"

using namespace lvc;

namespace {

ControlSignal zeros(const ProblemInstance& p)
{
    return ControlSignal::constant(p.n_time_steps, p.horizon, Control(p.controls.dim(), 0.0));
}

}  // namespace

TEST_CASE("Monte Carlo oracle: closed form, far target, determinism")
{
    const auto p = testing::still_problem(TargetSet::circle({0.0, 0.0}, 1.0), 2);
    const auto u = zeros(p);
    const auto est = mc_cost(p, u, 1'000'000, 42);
    CHECK(est.n_samples == 1'000'000);
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.value - testing::gaussian_disc_mass(1.0)) <= 3.0 * est.std_error);

    const auto again = mc_cost(p, u, 1'000'000, 42, Exec::serial);
    CHECK(again.value == est.value);
    CHECK(again.std_error == est.std_error);
    CHECK(mc_cost(p, u, 1'000'000, 43).value != est.value);

    const auto far = testing::still_problem(TargetSet::circle({1e6, 0.0}, 1.0), 2);
    const auto zero = mc_cost(far, u, 100'000, 1);
    CHECK(zero.value == 0.0);
    CHECK(zero.std_error == 0.0);

    CHECK_THROWS(mc_cost(p, u, 999, 1));
}

TEST_CASE("Monte Carlo oracle agrees with an independent sampler on the pendulum")
{
    const auto p = make_benchmark("pendulum", {{"problem.n_time_steps", "300"}});
    const auto u = zeros(p);
    const auto ours = mc_cost(p, u, 200'000, 5);
    const auto ref = testing::particle_estimate(p, u, 200'000, 9);
    CHECK(std::abs(ours.value - ref.value) <= 3.0 * std::hypot(ours.std_error, ref.std_error));
}

TEST_CASE("grid oracle: closed form, zero density, contract")
{
    const auto p = testing::still_problem(TargetSet::circle({0.0, 0.0}, 1.0), 2);
    const auto u = zeros(p);
    CHECK(std::abs(grid_cost(p, u, 6.0, 512) - testing::gaussian_disc_mass(1.0)) <= 1e-3);
    CHECK(grid_cost(p, u, 6.0, 512, Exec::serial) == grid_cost(p, u, 6.0, 512, Exec::parallel));

    auto empty = p;
    empty.density = InitialDensity::custom([](Vec2) { return 0.0; });
    CHECK(grid_cost(empty, u, 6.0, 64) == 0.0);

    CHECK_THROWS(grid_cost(p, u, 6.0, 31));
    CHECK_THROWS(grid_cost(p, u, 5.0, 64));
}

TEST_CASE("grid and Monte Carlo oracles agree on the pendulum at rest")
{
    const auto p = make_benchmark("pendulum", {{"problem.n_time_steps", "300"}});
    const auto u = zeros(p);
    const auto mc = mc_cost(p, u, 1'000'000, 1);
    const double grid = grid_cost(p, u, 6.0, 512);
    CHECK(std::abs(grid - mc.value) <= 3.0 * mc.std_error);
}
