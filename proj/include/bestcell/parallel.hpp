#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace bestcell {

enum class Execution { Serial, Parallel };

/// How a kernel distributes independent work items.
///
/// `workers == 0` leaves the thread count to the OpenMP runtime.
struct ExecPolicy {
    Execution mode = Execution::Parallel;
    int workers = 0;

    static ExecPolicy serial() { return {Execution::Serial, 1}; }
};

/// Calls fn(i) for i in [0, n). Items must be independent; the first
/// exception thrown by any item is rethrown on the calling thread.
template <class Fn>
void for_each_index(std::size_t n, const ExecPolicy& policy, Fn&& fn) {
    if (policy.mode == Execution::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    const int threads = policy.workers > 0 ? policy.workers : omp_get_max_threads();
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(guard);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace bestcell
