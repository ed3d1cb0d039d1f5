#include "chaoskit/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace chaoskit {

namespace {
std::atomic<int> g_cap_override{0};
}

void set_thread_cap(int cap) { g_cap_override.store(cap < 0 ? 0 : cap); }

int thread_cap() {
    const int forced = g_cap_override.load();
    if (forced > 0) return forced;
    if (const char* env = std::getenv("CHAOSKIT_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<int>(parsed > 1024 ? 1024 : parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, const std::function<void(int, int)>& chunk_fn) {
    if (count <= 0) return;
    const int workers = std::min(thread_cap(), count);
    if (workers <= 1) {
        chunk_fn(0, count);
        return;
    }

    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto guarded = [&](int begin, int end) {
        try {
            chunk_fn(begin, end);
        } catch (...) {
            bool expected = false;
            if (failed.compare_exchange_strong(expected, true)) {
                first_error = std::current_exception();
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers) - 1);
    const int base = count / workers;
    const int extra = count % workers;
    int begin = 0;
    for (int w = 0; w < workers; ++w) {
        const int len = base + (w < extra ? 1 : 0);
        const int end = begin + len;
        if (w + 1 == workers) {
            guarded(begin, end);
        } else {
            threads.emplace_back(guarded, begin, end);
        }
        begin = end;
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace chaoskit
