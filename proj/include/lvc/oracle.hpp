#pragma once

#include <cstddef>
#include <cstdint>

#include "lvc/exec.hpp"
#include "lvc/flow.hpp"
#include "lvc/problem.hpp"

namespace lvc {

struct OracleEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

/// Fraction of rho0-distributed particles that land in the target after forward
/// advection over [0, T], with its binomial standard error.
///
/// Samples are drawn in fixed chunks of kMcChunk. Chunk c uses std::mt19937_64 seeded with
/// std::seed_seq{seed_lo, seed_hi, c}; each sample consumes two 64-bit outputs mapped to
/// (0, 1] by ((r >> 11) + 1) * 2^-53 and turned into a normal pair by Box-Muller. The
/// estimate depends only on (seed, n_samples), never on the thread count.
/// Requires a Gaussian initial density and n_samples >= 1000.
OracleEstimate mc_cost(const ProblemInstance& problem, const ControlSignal& signal, std::size_t n_samples,
                       std::uint64_t seed, Exec exec = Exec::parallel);

inline constexpr std::size_t kMcChunk = 1u << 14;

/// Midpoint quadrature of rho0(x) * [Phi_{0,T}(x) in A] over the square of half width
/// `half_width` centered at the density center, with n_cells x n_cells cells.
/// Requires n_cells >= 32 and, for Gaussian densities, half_width >= 6 sigma.
double grid_cost(const ProblemInstance& problem, const ControlSignal& signal, double half_width,
                 std::size_t n_cells, Exec exec = Exec::parallel);

}  // namespace lvc
