#include "psv/util.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

namespace psv {

int default_jobs() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

void parallel_tiles(std::int64_t count, std::int64_t tile_size, int jobs,
                    const std::function<void(std::int64_t, std::int64_t, std::size_t)>& fn) {
    if (count <= 0) return;
    if (tile_size <= 0) tile_size = 1;
    std::int64_t n_tiles = (count + tile_size - 1) / tile_size;
    if (jobs <= 0) jobs = default_jobs();
    int workers = int(std::min<std::int64_t>(jobs, n_tiles));

    if (workers <= 1) {
        for (std::int64_t t = 0; t < n_tiles; ++t) {
            std::int64_t b = t * tile_size;
            fn(b, std::min(count, b + tile_size), std::size_t(t));
        }
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int i = 0; i < workers; ++i) {
        pool.emplace_back([&]() {
            for (;;) {
                std::int64_t t = next.fetch_add(1);
                if (t >= n_tiles) return;
                std::int64_t b = t * tile_size;
                fn(b, std::min(count, b + tile_size), std::size_t(t));
            }
        });
    }
    for (auto& th : pool) th.join();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace psv
