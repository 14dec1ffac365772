#include <doctest.h>

#include <omp.h>

#include <atomic>
#include <stdexcept>
#include <string>

#include "lvc/exec.hpp"
#include "lvc/oracle.hpp"
#include "lvc/solver.hpp"

using namespace lvc;

namespace {

struct ThreadScope {
    explicit ThreadScope(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadScope() { omp_set_num_threads(saved); }
    int saved;
};

bool same_traces(const BoundaryTrajectory& a, const BoundaryTrajectory& b)
{
    if (a.params != b.params || a.n_vertices() != b.n_vertices()) return false;
    for (std::size_t i = 0; i < a.n_vertices(); ++i) {
        if (a.traces[i].positions != b.traces[i].positions) return false;
        if (a.traces[i].jacobian_det != b.traces[i].jacobian_det) return false;
        if (a.traces[i].density != b.traces[i].density) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("for_each_index visits every index and rethrows the lowest failure")
{
    ThreadScope threads(4);
    std::vector<int> hit(1000, 0);
    for_each_index(Exec::parallel, hit.size(), [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) CHECK(h == 1);

    for (const Exec exec : {Exec::serial, Exec::parallel}) {
        try {
            for_each_index(exec, 100, [](std::size_t i) {
                if (i == 37 || i == 80) throw std::runtime_error(std::to_string(i));
            });
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "37");
        }
    }
}

TEST_CASE("parallel kernels are bit-identical to the serial reference")
{
    ThreadScope threads(4);
    for (const auto& name : benchmark_names()) {
        const auto p = make_benchmark(name, {{"problem.n_time_steps", "200"}, {"problem.n_boundary_pts", "96"}});
        const auto u = default_initial_signal(p);

        const auto es = evaluate_cost(p, u, Exec::serial);
        const auto ep = evaluate_cost(p, u, Exec::parallel);
        CHECK(es.cost == ep.cost);
        CHECK(same_traces(es.trajectory, ep.trajectory));

        const auto ls = linearize(p, u, es.trajectory, Exec::serial);
        const auto lp = linearize(p, u, es.trajectory, Exec::parallel);
        CHECK(ls.g.values == lp.g.values);
        CHECK(ls.w == lp.w);

        const auto ms = mc_cost(p, u, 40'000, 9, Exec::serial);
        const auto mp = mc_cost(p, u, 40'000, 9, Exec::parallel);
        CHECK(ms.value == mp.value);
        CHECK(ms.std_error == mp.std_error);
        CHECK(grid_cost(p, u, 6.0, 64, Exec::serial) == grid_cost(p, u, 6.0, 64, Exec::parallel));

        SolverConfig config;
        config.max_iters = 4;
        config.exec = Exec::serial;
        const auto ss = solve(p, u, config);
        config.exec = Exec::parallel;
        const auto sp = solve(p, u, config);
        CHECK(ss.control == sp.control);
        REQUIRE(ss.diagnostics.size() == sp.diagnostics.size());
        for (std::size_t k = 0; k < ss.diagnostics.size(); ++k) {
            CHECK(ss.diagnostics[k].cost == sp.diagnostics[k].cost);
            CHECK(ss.diagnostics[k].residual == sp.diagnostics[k].residual);
            CHECK(ss.diagnostics[k].epsilon == sp.diagnostics[k].epsilon);
        }
    }
}
