#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace fracwave {

/// Fork-join helper for embarrassingly parallel index ranges. The worker
/// count defaults to the hardware but is capped by FRACWAVE_THREADS; one
/// worker (or a single item) degrades to a plain loop on the calling thread,
/// so results never depend on scheduling.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t workers) : workers_(std::max<std::size_t>(workers, 1)) {}
    WorkerPool() : WorkerPool(default_workers()) {}

    static std::size_t default_workers() {
        std::size_t n = std::thread::hardware_concurrency();
        if (n == 0) n = 1;
        if (const char* env = std::getenv("FRACWAVE_THREADS")) {
            char* end = nullptr;
            const unsigned long v = std::strtoul(env, &end, 10);
            if (end == env || *end != '\0' || v == 0)
                throw std::invalid_argument("FRACWAVE_THREADS must be a positive integer");
            n = static_cast<std::size_t>(v);
        }
        return n;
    }

    [[nodiscard]] std::size_t workers() const noexcept { return workers_; }

    /// Runs fn(item, worker) for item = 0..count-1. `worker` indexes the
    /// executing lane (< workers()), letting callers keep per-worker scratch.
    /// The first exception thrown wins and is rethrown after the join.
    void parallel_for(std::size_t count,
                      const std::function<void(std::size_t, std::size_t)>& fn) const {
        const std::size_t lanes = std::min(workers_, count);
        if (lanes <= 1) {
            for (std::size_t i = 0; i < count; ++i) fn(i, 0);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto body = [&](std::size_t lane) {
            try {
                for (;;) {
                    if (failed.load(std::memory_order_relaxed)) return;
                    const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                    if (i >= count) return;
                    fn(i, lane);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        };
        std::vector<std::thread> threads;
        threads.reserve(lanes - 1);
        for (std::size_t lane = 1; lane < lanes; ++lane) threads.emplace_back(body, lane);
        body(0);
        for (auto& t : threads) t.join();
        if (error) std::rethrow_exception(error);
    }

private:
    std::size_t workers_;
};

}  // namespace fracwave
