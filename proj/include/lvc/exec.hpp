#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <vector>

namespace lvc {

/// Selects the serial reference loop or the OpenMP loop for the data-parallel kernels.
/// Both produce bit-identical results: every kernel writes into per-index slots and
/// reduces them afterwards in index order.
enum class Exec { serial, parallel };

/// Calls body(i) for i in [0, n). Exceptions thrown by the body are rethrown after the
/// loop; when several indices fail, the one with the lowest index wins.
template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body)
{
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace lvc
