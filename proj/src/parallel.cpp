#include "tpan/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace tpan {

namespace {

int g_threads = 0;  // 0 = unset

int default_threads() {
    if (const char* env = std::getenv("TPAN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int thread_count() { return g_threads > 0 ? g_threads : default_threads(); }

void set_thread_count(int n) { g_threads = n; }

void parallel_partitions(int n, const std::function<void(int, int, int)>& fn) {
    if (n <= 0) return;
    const int parts = n < kPartitionCount ? n : kPartitionCount;
    const int workers = std::min(thread_count(), parts);
    if (workers <= 1) {
        for (int p = 0; p < parts; ++p) {
            const int begin = static_cast<int>(static_cast<long long>(n) * p / parts);
            const int end = static_cast<int>(static_cast<long long>(n) * (p + 1) / parts);
            fn(p, begin, end);
        }
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int p = next.fetch_add(1);
            if (p >= parts) return;
            const int begin = static_cast<int>(static_cast<long long>(n) * p / parts);
            const int end = static_cast<int>(static_cast<long long>(n) * (p + 1) / parts);
            fn(p, begin, end);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

void parallel_rows(int rows, const std::function<void(int, int)>& fn) {
    parallel_partitions(rows, [&](int, int begin, int end) { fn(begin, end); });
}

}  // namespace tpan
