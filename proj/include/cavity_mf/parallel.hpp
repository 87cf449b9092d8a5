#ifndef CAVITY_MF_PARALLEL_HPP
#define CAVITY_MF_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace cavity_mf {

/// Worker count from CAVITY_MF_JOBS, falling back to 1.
inline unsigned default_jobs() {
    if (const char* env = std::getenv("CAVITY_MF_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return 1;
}

/// Evaluates f(0) ... f(n-1) on up to `jobs` threads. Results are stored by
/// index, so the output order never depends on completion order. The first
/// exception thrown by any task is rethrown after all workers join.
template <typename F>
auto parallel_map(std::size_t n, F&& f, unsigned jobs) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace cavity_mf

#endif
