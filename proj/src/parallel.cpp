#include "qwp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qwp {
namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_threads() {
    const char* v = std::getenv("QWP_THREADS");
    if (v == nullptr) return 0;
    try {
        long n = std::stol(v);
        return n > 0 ? static_cast<std::size_t>(n) : 0;
    } catch (...) {
        return 0;
    }
}

}  // namespace

std::size_t thread_count() {
    if (auto o = g_override.load(); o > 0) return o;
    if (auto e = env_threads(); e > 0) return e;
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(std::size_t n) { g_override.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace qwp
