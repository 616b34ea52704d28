#include "immindex/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace immindex {

int max_worker_threads() {
    static const int cached = [] {
        int hw = int(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (const char* env = std::getenv("IMMIDX_THREADS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v >= 1 && v < hw) return int(v);
        }
        return hw;
    }();
    return cached;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int workers = max_worker_threads();
    if (count == 0) return;
    if (workers <= 1 || count < 4) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            fn(i);
        }
    };
    const std::size_t nthreads = std::min<std::size_t>(std::size_t(workers) - 1, count - 1);
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) threads.emplace_back(body);
    body();
    for (auto& t : threads) t.join();
}

}  // namespace immindex
