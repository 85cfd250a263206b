#include "borel_lab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace borel_lab {

namespace {
std::atomic<int> g_workers{0};
thread_local bool t_inside = false;  // nested loops run serially on the calling worker
}

int default_workers() {
    int w = g_workers.load();
    if (w > 0) return w;
    if (const char* env = std::getenv("BOREL_LAB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

void set_default_workers(int n) { g_workers.store(n > 0 ? n : 0); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers) {
    if (workers <= 0) workers = default_workers();
    if (n == 0) return;
    if (workers == 1 || n == 1 || t_inside) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    auto run = [&] {
        const bool was = t_inside;
        t_inside = true;
        struct Restore {
            bool v;
            ~Restore() { t_inside = v; }
        } restore{was};
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!first) first = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (std::size_t t = 0; t + 1 < nt; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

}  // namespace borel_lab
