#include "lvc/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace lvc {

namespace {

double unit_open_closed(std::mt19937_64& gen)
{
    return static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

OracleEstimate mc_cost(const ProblemInstance& problem, const ControlSignal& signal, std::size_t n_samples,
                       std::uint64_t seed, Exec exec)
{
    const auto& gauss = problem.density.gaussian_params();
    if (!gauss) throw std::invalid_argument("mc_cost samples Gaussian densities only");
    if (n_samples < 1000) throw std::invalid_argument("mc_cost needs at least 1000 samples");

    const std::size_t n_chunks = (n_samples + kMcChunk - 1) / kMcChunk;
    std::vector<std::size_t> hits(n_chunks, 0);
    const std::size_t last = problem.n_time_steps;

    for_each_index(exec, n_chunks, [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(c)};
        std::mt19937_64 gen(seq);
        const std::size_t begin = c * kMcChunk;
        const std::size_t end = std::min(n_samples, begin + kMcChunk);
        std::size_t inside = 0;
        for (std::size_t s = begin; s < end; ++s) {
            const double u1 = unit_open_closed(gen);
            const double u2 = unit_open_closed(gen);
            const double r = gauss->sigma * std::sqrt(-2.0 * std::log(u1));
            const double phi = 2.0 * std::numbers::pi * u2;
            const Vec2 x0 = gauss->center + Vec2{r * std::cos(phi), r * std::sin(phi)};
            const Vec2 xT = advect(problem.field, signal, 0, last, x0, problem.integrator);
            if (problem.target.contains(xT)) ++inside;
        }
        hits[c] = inside;
    });

    std::size_t total = 0;
    for (auto h : hits) total += h;
    const double n = static_cast<double>(n_samples);
    const double p = static_cast<double>(total) / n;
    return {p, std::sqrt(p * (1.0 - p) / n), n_samples};
}

double grid_cost(const ProblemInstance& problem, const ControlSignal& signal, double half_width,
                 std::size_t n_cells, Exec exec)
{
    if (n_cells < 32) throw std::invalid_argument("grid_cost needs at least 32 cells per axis");
    if (const auto& gauss = problem.density.gaussian_params(); gauss && half_width < 6.0 * gauss->sigma) {
        throw std::invalid_argument("grid_cost box must cover 6 sigma around the density center");
    }
    if (!(half_width > 0.0)) throw std::invalid_argument("grid_cost half width must be positive");

    const Vec2 c = problem.density.center();
    const double h = 2.0 * half_width / static_cast<double>(n_cells);
    const std::size_t last = problem.n_time_steps;
    std::vector<double> rows(n_cells, 0.0);

    for_each_index(exec, n_cells, [&](std::size_t r) {
        const double x2 = c.x2 - half_width + (static_cast<double>(r) + 0.5) * h;
        double row = 0.0;
        for (std::size_t k = 0; k < n_cells; ++k) {
            const Vec2 x{c.x1 - half_width + (static_cast<double>(k) + 0.5) * h, x2};
            const double rho = problem.density(x);
            if (rho == 0.0) continue;
            if (problem.target.contains(advect(problem.field, signal, 0, last, x, problem.integrator))) row += rho;
        }
        rows[r] = row;
    });

    double sum = 0.0;
    for (double row : rows) sum += row;
    return sum * h * h;
}

}  // namespace lvc
