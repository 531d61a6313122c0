#include "pabisim/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace pabisim {

unsigned worker_count() {
    if (const char* env = std::getenv("PABISIM_THREADS")) {
        try {
            long n = std::stol(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned workers = worker_count();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace pabisim
