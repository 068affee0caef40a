#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qcorr {

/// Worker count: hardware concurrency, capped by the QCORR_THREADS variable.
inline int thread_budget() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("QCORR_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < n) n = cap;
        } catch (const std::exception&) {
            // unparseable cap is ignored
        }
    }
    return n;
}

/// Runs body(i) for i in [0, n). Work is pulled from a shared counter, so the
/// assignment of indices to threads is not deterministic — bodies must write
/// only to their own index's slot. The first exception is rethrown after all
/// threads join.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    const int workers = std::min(thread_budget(), n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(run);
    for (std::thread& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace qcorr
