#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bsns {

// BSNS_THREADS caps the worker count
inline unsigned worker_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BSNS_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1)
            hw = std::min(hw, (unsigned)cap);
    }
    return hw;
}

namespace detail {
inline thread_local bool in_worker = false;
}

// f(i) for i in [0, n), static chunking; rethrows the first exception.
// Calls made from inside a worker run serially.
template <class F>
void parallel_for(size_t n, F&& f)
{
    unsigned nw = detail::in_worker ? 1u : (unsigned)std::min<size_t>(worker_count(), n);
    if (nw <= 1) {
        for (size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex em;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nw; ++w) {
        pool.emplace_back([&, w] {
            detail::in_worker = true;
            try {
                for (size_t i = w; i < n; i += nw)
                    f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(em);
                if (!err)
                    err = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

} // namespace bsns
