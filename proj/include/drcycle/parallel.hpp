#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace drc {

// Worker count for the graph-sum reductions. Starts from DRCYCLE_THREADS
// (falling back to 1) and can be overridden by the CLI.
int thread_count();
void set_thread_count(int n);

// True on pool threads; nested parallel_for calls then run inline.
bool& in_worker();

// Runs f(i) for i in [0, n) on the worker pool. Results must be written to
// per-index slots so the caller can merge them in a fixed order.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const int t = thread_count();
    if (t <= 1 || n <= 1 || in_worker()) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        in_worker() = true;
        while (true) {
            std::size_t i = next++;
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), n);
    for (std::size_t i = 0; i < k; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace drc
